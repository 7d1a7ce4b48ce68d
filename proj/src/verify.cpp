#include "beltrami/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "beltrami/error.hpp"

namespace beltrami {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Bit-level recipe so reports do not depend on the standard library's
// distribution implementations.
class PairSampler {
 public:
  explicit PairSampler(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  cplx in_disk(double radius) {
    for (;;) {
      const cplx z(uniform(-1.0, 1.0), uniform(-1.0, 1.0));
      if (std::norm(z) <= 1.0) {
        return radius * z;
      }
    }
  }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

double ball_volume_times(int n, double eps) { return unit_ball_volume(n) * std::pow(eps, n); }

}  // namespace

double holder_product(const PlanarMap& f, cplx x, cplx y, double r0, int n) {
  if (!(r0 > 0.0)) {
    throw DomainError("r0 must be positive");
  }
  if (n < 2) {
    throw DomainError("dimension must be at least 2");
  }
  const double d = std::abs(x - y);
  if (d == 0.0) {
    return 0.0;
  }
  const double lg = std::log1p(r0 / (2.0 * d));
  return std::abs(f(x) - f(y)) * std::pow(lg, 1.0 / n);
}

std::vector<double> dyadic_scales(int j_min, int j_max) {
  if (j_min > j_max) {
    throw DomainError("dyadic scale range is empty");
  }
  std::vector<double> out;
  for (int j = j_min; j <= j_max; ++j) {
    out.push_back(std::ldexp(1.0, -j));
  }
  return out;
}

void HolderConfig::validate() const {
  std::vector<std::string> problems;
  if (!(compact_radius > 0.0 && compact_radius < 1.0)) {
    problems.push_back("compact_radius must lie in (0, 1)");
  }
  if (!(r0 > 0.0) || compact_radius + r0 > 1.0 + 1e-12) {
    problems.push_back("r0 must be positive with compact_radius + r0 <= 1");
  }
  if (scales.empty()) {
    problems.push_back("at least one scale is required");
  }
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (!(scales[i] > 0.0 && scales[i] < 2.0 * compact_radius)) {
      problems.push_back("scales must lie in (0, 2 * compact_radius)");
      break;
    }
    if (i > 0 && !(scales[i] < scales[i - 1])) {
      problems.push_back("scales must be strictly decreasing");
      break;
    }
  }
  if (pairs_per_scale < 1) {
    problems.push_back("pairs_per_scale must be positive");
  }
  if (n < 2) {
    problems.push_back("n must be at least 2");
  }
  if (!problems.empty()) {
    throw ValidationError(std::move(problems));
  }
}

HolderReport holder_scan(const PlanarMap& f, const HolderConfig& cfg, std::optional<double> q_l1) {
  cfg.validate();
  HolderReport rep;
  rep.scales = cfg.scales;
  const double R = cfg.compact_radius;

  for (std::size_t s = 0; s < cfg.scales.size(); ++s) {
    const double delta = cfg.scales[s];
    PairSampler rng(splitmix(cfg.seed ^ splitmix(static_cast<std::uint64_t>(s) + 1)));
    std::vector<double> circles;
    for (double c : cfg.branch_radii) {
      if (c > 0.0 && c + 0.5 * delta <= R) {
        circles.push_back(c);
      }
    }
    double best = 0.0;
    cplx best_x = cfg.center;
    cplx best_y = cfg.center;
    for (int k = 0; k < cfg.pairs_per_scale; ++k) {
      cplx x{};
      cplx y{};
      bool placed = false;
      if (!circles.empty() && k % 2 == 1) {
        for (int attempt = 0; attempt < 20 && !placed; ++attempt) {
          const auto pick = std::min(circles.size() - 1, static_cast<std::size_t>(rng.uniform() * circles.size()));
          const double theta = rng.uniform(0.0, 2.0 * kPi);
          const double phi = rng.uniform(-0.25 * kPi, 0.25 * kPi);
          const cplx mid = circles[pick] * std::polar(1.0, theta);
          const cplx dir = std::polar(1.0, theta + phi);
          x = mid - 0.5 * delta * dir;
          y = mid + 0.5 * delta * dir;
          placed = std::abs(x) <= R && std::abs(y) <= R;
        }
      }
      while (!placed) {
        x = rng.in_disk(R);
        y = x + std::polar(delta, rng.uniform(0.0, 2.0 * kPi));
        placed = std::abs(y) <= R;
      }
      x += cfg.center;
      y += cfg.center;
      const double v = holder_product(f, x, y, cfg.r0, cfg.n);
      if (!std::isfinite(v)) {
        throw DomainError("map under test returned a non-finite value");
      }
      if (v > best) {
        best = v;
        best_x = x;
        best_y = y;
      }
    }
    rep.per_scale_max_product.push_back(best);
    rep.per_scale_argmax_x.push_back(best_x);
    rep.per_scale_argmax_y.push_back(best_y);
  }

  const auto& m = rep.per_scale_max_product;
  if (m.size() >= 3) {
    const double a = m[m.size() - 3];
    const double b = m[m.size() - 2];
    const double c = m[m.size() - 1];
    rep.bounded_flag = !(a <= b && b <= c && c > 1.05 * a);
  }

  const double top = *std::max_element(m.begin(), m.end());
  rep.empirical_C = std::numeric_limits<double>::quiet_NaN();
  if (q_l1) {
    rep.q_l1 = *q_l1;
    rep.q_l1_divergent = !std::isfinite(*q_l1);
    if (std::isfinite(*q_l1) && *q_l1 > 0.0) {
      rep.empirical_C = top / std::pow(*q_l1, 1.0 / cfg.n);
    }
  }
  return rep;
}

std::string to_string(ScanClass c) {
  switch (c) {
    case ScanClass::Divergent:
      return "divergent";
    case ScanClass::Convergent:
      return "convergent";
    case ScanClass::Inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

LehtoScan lehto_divergence_scan(const RadialWeight& w, double delta, const std::vector<double>& cutoffs,
                                const QuadratureConfig& cfg) {
  if (!(delta > 0.0)) {
    throw DomainError("delta must be positive");
  }
  if (cutoffs.size() < 4) {
    throw DomainError("the divergence scan needs at least four cutoffs");
  }
  for (std::size_t i = 0; i < cutoffs.size(); ++i) {
    if (!(cutoffs[i] > 0.0 && cutoffs[i] < delta) || (i > 0 && !(cutoffs[i] < cutoffs[i - 1]))) {
      throw DomainError("cutoffs must decrease strictly inside (0, delta)");
    }
  }
  LehtoScan scan;
  scan.cutoffs = cutoffs;
  double upper = delta;
  double total = 0.0;
  try {
    for (double c : cutoffs) {
      total += lehto_integral(w, c, upper, cfg);
      scan.values.push_back(total);
      upper = c;
    }
  } catch (const Error& e) {
    scan.diagnostics = std::string("quadrature failed: ") + e.what();
    return scan;
  }

  const std::size_t m = scan.values.size();
  if (!std::isfinite(scan.values.back())) {
    scan.classification = ScanClass::Divergent;
    scan.diagnostics = "integral is infinite at the smallest cutoff";
    return scan;
  }
  // Increments per unit of log-scale over the last three cutoffs.
  double kappa[3];
  double inc[3];
  for (int t = 0; t < 3; ++t) {
    const std::size_t i = m - 3 + static_cast<std::size_t>(t);
    inc[t] = scan.values[i] - scan.values[i - 1];
    kappa[t] = inc[t] / std::log(cutoffs[i - 1] / cutoffs[i]);
  }
  const double mean = (kappa[0] + kappa[1] + kappa[2]) / 3.0;
  const bool steady = mean > 0.0 && std::all_of(std::begin(kappa), std::end(kappa),
                                                [mean](double k) { return std::abs(k - mean) <= 0.25 * mean; });
  const bool decaying = inc[0] > 0.0 && inc[1] <= 0.9 * inc[0] && inc[2] <= 0.9 * inc[1];
  if (steady) {
    scan.classification = ScanClass::Divergent;
    scan.diagnostics = "increments grow like " + std::to_string(mean) + " * ln(1/cutoff)";
  } else if (decaying || (inc[0] == 0.0 && inc[1] == 0.0 && inc[2] == 0.0)) {
    scan.classification = ScanClass::Convergent;
    scan.diagnostics = "increments decay geometrically";
  } else {
    scan.diagnostics = "increments neither steady in log-scale nor geometrically decaying";
  }
  return scan;
}

std::vector<FmoValue> fmo_statistic(const Density& Q, std::span<const double> x0, const std::vector<double>& eps_list,
                                    const QuadratureConfig& cfg) {
  const int n = Q.dimension();
  if (x0.size() != static_cast<std::size_t>(n)) {
    throw DomainError("center dimension does not match density dimension");
  }
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0) || (i > 0 && !(eps_list[i] < eps_list[i - 1]))) {
      throw DomainError("eps values must be positive and strictly decreasing");
    }
  }
  const bool radial = Q.is_radial_about(x0);
  if (!radial && n != 2) {
    throw DomainError("non-radial mean oscillation is supported only in the plane");
  }
  QuadratureConfig inner = cfg;
  inner.abs_tol *= 0.1;
  inner.rel_tol *= 0.1;

  // Integral over the sphere of radius r of g(Q), times r^{n-1} (spherical measure).
  auto shell = [&](double r, const std::function<double(double)>& g) {
    if (radial) {
      return unit_sphere_area(n) * g(Q.radial_value(r)) * std::pow(r, n - 1);
    }
    auto ring = [&](double theta) {
      const double p[2] = {x0[0] + r * std::cos(theta), x0[1] + r * std::sin(theta)};
      return g(Q(std::span<const double>(p, 2)));
    };
    return adaptive_integral_1d(ring, 0.0, 2.0 * kPi, inner).value * r;
  };

  std::vector<FmoValue> out;
  for (double eps : eps_list) {
    FmoValue v;
    v.eps = eps;
    const double vol = ball_volume_times(n, eps);
    try {
      const double total = adaptive_integral_1d([&](double r) { return shell(r, [](double q) { return q; }); }, 0.0,
                                                eps, cfg)
                               .value;
      if (!std::isfinite(total)) {
        v.value = kInf;
        v.divergent = true;
      } else {
        const double mean = total / vol;
        const double osc = adaptive_integral_1d(
                               [&](double r) { return shell(r, [mean](double q) { return std::abs(q - mean); }); },
                               0.0, eps, cfg)
                               .value;
        v.value = osc / vol;
      }
    } catch (const NonConvergence& e) {
      v.value = e.partial() / vol;
      v.divergent = true;
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace beltrami
