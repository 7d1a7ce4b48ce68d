#include "beltrami/dilatation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "beltrami/error.hpp"

namespace beltrami {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_closed_disk(cplx z) {
  if (std::abs(z) > 1.0 + 1e-12) {
    throw DomainError("point lies outside the closed unit disk");
  }
}

cplx unit_phase_squared(cplx z) {
  const double r = std::abs(z);
  const cplx u = z / r;
  return u * u;
}

}  // namespace

cplx mu_example3(cplx z, double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0)) {
    throw DomainError("Example 3 needs 0 < alpha < 2");
  }
  const double r = std::abs(z);
  if (r >= 1.0) {
    throw DomainError("Example 3 dilatation is defined for |z| < 1");
  }
  if (r <= 0.5) {
    return 0.0;
  }
  const double t = alpha * (2.0 * r - 1.0);
  return unit_phase_squared(z) * ((2.0 * r - t) / (2.0 * r + t));
}

cplx mu_example4(cplx z) {
  const double r = std::abs(z);
  if (r >= 1.0) {
    throw DomainError("Example 4 dilatation is defined for |z| < 1");
  }
  if (r <= std::exp(-0.5)) {
    return 0.0;
  }
  const double lr = std::log(r);
  return -unit_phase_squared(z) * (lr / (1.0 + lr));
}

double K_mu(cplx mu) {
  const double m = std::abs(mu);
  if (m > 1.0) {
    throw DomainError("|mu| > 1: map is not sense-preserving");
  }
  if (m == 1.0) {
    return kInf;
  }
  return (1.0 + m) / (1.0 - m);
}

double example3_truncation_radius(double alpha, double k) {
  const double ka = k * alpha;
  if (ka <= 1.0) {
    return 1.0;
  }
  return std::min(1.0, 0.5 * ka / (ka - 1.0));
}

double example4_truncation_radius(double k) {
  if (!(k >= 1.0)) {
    throw DomainError("truncation level k must be >= 1");
  }
  return std::exp((1.0 - k) / (2.0 * k));
}

// ---------------------------------------------------------------------------
// MuSpec

MuSpec MuSpec::example3(double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0)) {
    throw DomainError("Example 3 needs 0 < alpha < 2");
  }
  return MuSpec(Example3Mu{alpha});
}

MuSpec MuSpec::example4() { return MuSpec(Example4Mu{}); }

MuSpec MuSpec::constant_disk(cplx c) {
  if (!(std::abs(c) < 1.0)) {
    throw DomainError("constant dilatation needs |c| < 1");
  }
  return MuSpec(ConstantDiskMu{c});
}

MuSpec MuSpec::grid(ComplexField field) {
  for (const auto& v : field.samples()) {
    if (!(std::abs(v) < 1.0)) {
      throw DomainError("sampled dilatation must satisfy |mu| < 1");
    }
  }
  return MuSpec(GridMu{std::move(field)});
}

std::string MuSpec::name() const {
  std::string base = std::visit(overloaded{[](const Example3Mu& e) { return "example3(alpha=" + std::to_string(e.alpha) + ")"; },
                                           [](const Example4Mu&) { return std::string("example4"); },
                                           [](const ConstantDiskMu& c) {
                                             return "const(" + std::to_string(c.c.real()) + "," +
                                                    std::to_string(c.c.imag()) + ")";
                                           },
                                           [](const GridMu&) { return std::string("grid"); }},
                                kind_);
  if (truncated()) {
    base += "|k=" + std::to_string(cap_);
  }
  return base;
}

cplx MuSpec::raw(cplx z) const {
  return std::visit(overloaded{[z](const Example3Mu& e) { return mu_example3(z, e.alpha); },
                               [z](const Example4Mu&) { return mu_example4(z); },
                               [](const ConstantDiskMu& c) { return c.c; },
                               [z](const GridMu& g) {
                                 const GridSpec& gs = g.field.grid();
                                 if (z.real() < gs.x_min || z.real() > gs.x_max() || z.imag() < gs.y_min ||
                                     z.imag() > gs.y_max()) {
                                   return cplx{};
                                 }
                                 return g.field.interpolate(z);
                               }},
                    kind_);
}

cplx MuSpec::operator()(cplx z) const {
  const double r = std::abs(z);
  if (r >= 1.0) {
    return 0.0;
  }
  if (zero_radius_ > 0.0) {
    if (r < zero_radius_) {
      return 0.0;
    }
    return raw(z);
  }
  const cplx m = raw(z);
  if (truncated() && K_mu(m) > cap_) {
    return 0.0;
  }
  return m;
}

std::vector<double> MuSpec::jump_radii() const {
  std::vector<double> out;
  if (std::holds_alternative<Example3Mu>(kind_)) {
    if (zero_radius_ > 0.0 && zero_radius_ < 1.0) {
      out.push_back(zero_radius_);
    } else if (zero_radius_ == 0.0) {
      out.push_back(0.5);
    }
    if (zero_radius_ < 1.0) {
      out.push_back(1.0);
    }
  } else if (std::holds_alternative<Example4Mu>(kind_)) {
    if (zero_radius_ > 0.0 && zero_radius_ < 1.0) {
      out.push_back(zero_radius_);
    } else if (zero_radius_ == 0.0) {
      out.push_back(std::exp(-0.5));
    }
  } else if (std::holds_alternative<ConstantDiskMu>(kind_)) {
    if (!truncated() || K_mu(std::get<ConstantDiskMu>(kind_).c) <= cap_) {
      out.push_back(1.0);
    }
  }
  return out;
}

double MuSpec::sup_modulus() const {
  return std::visit(overloaded{[this](const Example3Mu&) {
                                 if (!truncated()) {
                                   return 1.0;
                                 }
                                 return zero_radius_ >= 1.0 ? 0.0 : (cap_ - 1.0) / (cap_ + 1.0);
                               },
                               [this](const Example4Mu&) {
                                 if (!truncated()) {
                                   return 1.0;
                                 }
                                 return zero_radius_ >= 1.0 ? 0.0 : (cap_ - 1.0) / (cap_ + 1.0);
                               },
                               [this](const ConstantDiskMu& c) {
                                 const double m = std::abs(c.c);
                                 return (truncated() && K_mu(c.c) > cap_) ? 0.0 : m;
                               },
                               [this](const GridMu& g) {
                                 double m = 0.0;
                                 for (const auto& v : g.field.samples()) {
                                   if (!truncated() || K_mu(v) <= cap_) {
                                     m = std::max(m, std::abs(v));
                                   }
                                 }
                                 return m;
                               }},
                    kind_);
}

MuSpec truncate_mu(const MuSpec& spec, double k) {
  if (!(k >= 1.0)) {
    throw DomainError("truncation level k must be >= 1");
  }
  MuSpec out = spec;
  // A second truncation can only lower the cap.
  out.cap_ = spec.truncated() ? std::min(spec.cap_, k) : k;
  if (const auto* e = std::get_if<Example3Mu>(&spec.kind_)) {
    out.zero_radius_ = example3_truncation_radius(e->alpha, out.cap_);
  } else if (std::holds_alternative<Example4Mu>(spec.kind_)) {
    out.zero_radius_ = example4_truncation_radius(out.cap_);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Closed-form maps

cplx example3_map(cplx z, double alpha, double k) {
  require_closed_disk(z);
  const double r = std::abs(z);
  if (r == 0.0) {
    return 0.0;
  }
  if (k > 0.0) {
    const double R = example3_truncation_radius(alpha, k);
    if (R >= 1.0) {
      return z;
    }
    if (r <= R) {
      return z * std::pow(1.0 / (k * alpha - 1.0), 1.0 / alpha) / R;
    }
  } else if (r <= 0.5) {
    return 0.0;
  }
  return (z / r) * std::pow(2.0 * r - 1.0, 1.0 / alpha);
}

cplx example3_inverse(cplx y, double alpha, double k) {
  require_closed_disk(y);
  const double s = std::abs(y);
  if (s == 0.0) {
    return 0.0;
  }
  if (k > 0.0) {
    const double R = example3_truncation_radius(alpha, k);
    if (R >= 1.0) {
      return y;
    }
    const double threshold = std::pow(1.0 / (k * alpha - 1.0), 1.0 / alpha);
    if (s <= threshold) {
      return y * R / threshold;
    }
  }
  return y * (std::pow(s, alpha) + 1.0) / (2.0 * s);
}

cplx example4_map(cplx z, double k) {
  require_closed_disk(z);
  const double r = std::abs(z);
  if (r == 0.0) {
    return 0.0;
  }
  if (k > 0.0) {
    if (r <= example4_truncation_radius(k)) {
      return z * std::exp((k - 1.0) / (2.0 * k)) / std::sqrt(k);
    }
  } else if (r <= std::exp(-0.5)) {
    return 0.0;
  }
  return (z / r) * std::sqrt(std::max(0.0, 2.0 * std::log(r) + 1.0));
}

cplx example4_inverse(cplx y, double k) {
  require_closed_disk(y);
  const double s = std::abs(y);
  if (s == 0.0) {
    return 0.0;
  }
  if (k > 0.0) {
    if (!(k >= 1.0)) {
      throw DomainError("truncation level k must be >= 1");
    }
    if (s <= 1.0 / std::sqrt(k)) {
      return y * std::exp((1.0 - k) / (2.0 * k)) * std::sqrt(k);
    }
  }
  return (y / s) * std::exp(0.5 * (s * s - 1.0));
}

Density example3_inverse_Q(double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0)) {
    throw DomainError("Example 3 needs 0 < alpha < 2");
  }
  return Density::radial(2, [alpha](double s) {
    if (s == 0.0) {
      return kInf;
    }
    const double sa = std::pow(s, alpha);
    return (sa + 1.0) / (alpha * sa);
  });
}

Density example4_inverse_Q() {
  return Density::radial(2, [](double s) { return s == 0.0 ? kInf : 1.0 / (s * s); });
}

// ---------------------------------------------------------------------------
// Pointwise dilatations

cplx mu_of_inverse(cplx f_z, cplx f_zbar) {
  if (!(std::abs(f_z) > std::abs(f_zbar))) {
    throw DegenerateJacobian("inverse dilatation needs |f_z| > |f_zbar|");
  }
  return -f_zbar / std::conj(f_z);
}

double K_Ip(cplx f_z, cplx f_zbar, double order_p) {
  if (!(order_p > 1.0 && order_p <= 2.0)) {
    throw DomainError("order p must lie in (1, 2]");
  }
  const double a = std::abs(f_z);
  const double b = std::abs(f_zbar);
  if (a + b == 0.0) {
    return 1.0;
  }
  if (a <= b) {
    return kInf;
  }
  return (a + b) * std::pow(a - b, 1.0 - order_p);
}

ComplexField K_Ip_field(const ComplexField& f_z, const ComplexField& f_zbar, double order_p) {
  if (!(f_z.grid() == f_zbar.grid())) {
    throw InvalidGrid("derivative fields must share a grid");
  }
  ComplexField out(f_z.grid(), true);
  for (std::size_t k = 0; k < out.data().size(); ++k) {
    out.data()[k] = K_Ip(f_z.data()[k], f_zbar.data()[k], order_p);
  }
  return out;
}

ComplexField dilatation_field(const ComplexField& f_z, const ComplexField& f_zbar) {
  if (!(f_z.grid() == f_zbar.grid())) {
    throw InvalidGrid("derivative fields must share a grid");
  }
  ComplexField out(f_z.grid(), true);
  for (std::size_t k = 0; k < out.data().size(); ++k) {
    const cplx a = f_z.data()[k];
    const cplx b = f_zbar.data()[k];
    if (a == cplx{}) {
      out.data()[k] = (b == cplx{}) ? cplx{} : cplx{kInf, 0.0};
    } else {
      out.data()[k] = b / a;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Norms and scans

L1Result l1_norm(const RadialWeight& w, const QuadratureConfig& cfg, const L1Options& opt) {
  if (opt.min_shells < 4 || opt.max_shells < opt.min_shells || opt.max_shells > 200) {
    throw DomainError("shell counts must satisfy 4 <= min_shells <= max_shells <= 200");
  }
  const double omega = unit_sphere_area(w.n);
  const int n = w.n;
  auto integrand = [&](double s) {
    const double q = w(s);
    if (q == kInf) {
      return kInf;
    }
    return omega * q * std::pow(s, n - 1);
  };

  L1Result out;
  double total = 0.0;
  for (int j = 0; j < opt.max_shells; ++j) {
    const double hi = std::ldexp(1.0, -j);
    const double lo = 0.5 * hi;
    const auto breaks = w.breakpoints(lo, hi);
    const double shell = adaptive_integral_1d(integrand, lo, hi, cfg, breaks).value;
    out.shell_inner.push_back(lo);
    out.shell_sums.push_back(shell);
    if (shell == kInf) {
      out.value = kInf;
      out.divergent = true;
      return out;
    }
    total += shell;
    if (shell <= 1e-15 * total) {
      break;
    }
    if (j + 1 >= opt.min_shells) {
      constexpr int kTail = 4;
      bool flat = true;
      const auto& s = out.shell_sums;
      for (int t = 0; t < kTail; ++t) {
        const double prev = s[s.size() - 2 - t];
        if (!(prev > 0.0) || s[s.size() - 1 - t] < opt.ratio_floor * prev) {
          flat = false;
        }
      }
      if (flat && total >= opt.growth_factor * shell) {
        out.divergent = true;
        break;
      }
    }
  }
  out.value = total;
  return out;
}

L1Result l1_norm(const Density& Q, const QuadratureConfig& cfg, const L1Options& opt) {
  const std::vector<double> origin(static_cast<std::size_t>(Q.dimension()), 0.0);
  RadialWeight w;
  w.n = Q.dimension();
  w.name = "spherical-mean";
  if (Q.is_radial_about(origin)) {
    w.q = [Q](double s) { return Q.radial_value(s); };
  } else {
    w.q = [Q, origin, cfg](double s) { return spherical_mean(Q, origin, s, cfg); };
  }
  return l1_norm(w, cfg, opt);
}

IntegrabilityScan spherical_integrability_scan(const Density& Q, std::span<const double> y0,
                                               std::span<const double> radii, const QuadratureConfig& cfg) {
  IntegrabilityScan out;
  for (double r : radii) {
    double mean;
    try {
      mean = spherical_mean(Q, y0, r, cfg);
    } catch (const NonConvergence& e) {
      mean = e.partial();
    }
    out.radii.push_back(r);
    out.means.push_back(mean);
    out.finite.push_back(std::isfinite(mean));
  }
  for (std::size_t k = 0; k + 1 < out.radii.size(); ++k) {
    const double weight = 0.5 * ((out.finite[k] ? 1.0 : 0.0) + (out.finite[k + 1] ? 1.0 : 0.0));
    out.finite_measure += std::abs(out.radii[k + 1] - out.radii[k]) * weight;
  }
  return out;
}

DilatationReport dilatation_report(const MuSpec& mu, const Density& Q, std::span<const double> radii,
                                   std::size_t probes_per_axis, const QuadratureConfig& cfg) {
  if (probes_per_axis < 2) {
    throw DomainError("need at least two probes per axis");
  }
  DilatationReport rep;
  const double h = 2.0 / static_cast<double>(probes_per_axis - 1);
  for (std::size_t j = 0; j < probes_per_axis; ++j) {
    for (std::size_t i = 0; i < probes_per_axis; ++i) {
      const cplx z(-1.0 + h * static_cast<double>(i), -1.0 + h * static_cast<double>(j));
      if (std::abs(z) < 1.0) {
        rep.K_mu_max_on_probe = std::max(rep.K_mu_max_on_probe, K_mu(mu(z)));
      }
    }
  }
  rep.l1_norm_Q = l1_norm(Q, cfg);
  const std::vector<double> origin(static_cast<std::size_t>(Q.dimension()), 0.0);
  rep.integrability_scan = spherical_integrability_scan(Q, origin, radii, cfg);
  return rep;
}

}  // namespace beltrami
