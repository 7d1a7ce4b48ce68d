#include "beltrami/radial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "beltrami/error.hpp"

namespace beltrami {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) {
    s += v * v;
  }
  return std::sqrt(s);
}

void require_dimension(int n) {
  if (n < 2) {
    throw DomainError("dimension must be at least 2");
  }
}

// 1 / (t q^{1/(n-1)}) with the a/inf = 0 and a/0 = inf conventions.
double lehto_integrand(const RadialWeight& w, double t) {
  const double q = w(t);
  if (std::isnan(q) || q < 0.0) {
    throw DomainError("radial weight must be nonnegative, got " + std::to_string(q) + " at t=" + std::to_string(t));
  }
  if (q == kInf) {
    return 0.0;
  }
  if (q == 0.0) {
    return kInf;
  }
  const double root = (w.n == 2) ? q : std::pow(q, 1.0 / static_cast<double>(w.n - 1));
  return 1.0 / (t * root);
}

}  // namespace

// ---------------------------------------------------------------------------
// Density

Density Density::general(int n, PointFn fn) {
  require_dimension(n);
  Density d;
  d.n_ = n;
  d.point_ = std::move(fn);
  return d;
}

Density Density::radial(int n, RadialFn fn, std::vector<double> center) {
  require_dimension(n);
  if (center.empty()) {
    center.assign(static_cast<std::size_t>(n), 0.0);
  }
  if (center.size() != static_cast<std::size_t>(n)) {
    throw DomainError("density center has the wrong dimension");
  }
  Density d;
  d.n_ = n;
  d.radial_ = std::move(fn);
  d.center_ = std::move(center);
  auto rf = d.radial_;
  auto c = d.center_;
  d.point_ = [rf, c](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
      s += (x[k] - c[k]) * (x[k] - c[k]);
    }
    return rf(std::sqrt(s));
  };
  return d;
}

Density Density::planar(std::function<double(cplx)> fn) {
  return general(2, [fn = std::move(fn)](std::span<const double> x) { return fn(cplx(x[0], x[1])); });
}

double Density::operator()(std::span<const double> x) const {
  if (x.size() != static_cast<std::size_t>(n_)) {
    throw DomainError("point dimension does not match density dimension");
  }
  return point_(x);
}

double Density::at(cplx z) const {
  const double xy[2] = {z.real(), z.imag()};
  return (*this)(std::span<const double>(xy, 2));
}

bool Density::is_radial_about(std::span<const double> y0) const {
  if (!radial_ || y0.size() != center_.size()) {
    return false;
  }
  return std::equal(y0.begin(), y0.end(), center_.begin());
}

// ---------------------------------------------------------------------------
// Weights

std::vector<double> RadialWeight::breakpoints(double lo, double hi) const {
  if (!jumps) {
    return {};
  }
  return jumps(lo, hi);
}

RadialWeight constant_weight(int n, double value) {
  require_dimension(n);
  if (!(value >= 0.0)) {
    throw DomainError("constant weight must be nonnegative");
  }
  return RadialWeight{n, [value](double) { return value; }, {}, "constant"};
}

RadialWeight power_weight(int n, double exponent) {
  require_dimension(n);
  return RadialWeight{n, [exponent](double t) { return std::pow(t, -exponent); }, {}, "power"};
}

double example1_phi(double t, int n) {
  if (!(t > 0.0)) {
    throw DomainError("example 1 function is defined for t > 0");
  }
  const double s = 1.0 / t;
  const double j = std::floor(s);
  const bool power_branch = (s == j) || (static_cast<long long>(j) % 2 == 1);
  return power_branch ? std::pow(t, -static_cast<double>(n)) : 1.0;
}

Density example1_density(int n) {
  return Density::radial(n, [n](double r) { return example1_phi(r, n); });
}

RadialWeight example1_weight(int n, double cap_m) {
  require_dimension(n);
  const double cutoff = cap_m > 0.0 ? 1.0 / cap_m : 0.0;
  auto q = [n, cutoff](double t) { return t <= cutoff ? 1.0 : example1_phi(t, n); };
  auto jumps = [cutoff](double lo, double hi) {
    std::vector<double> out;
    lo = std::max(lo, cutoff);
    if (!(hi > lo) || lo <= 0.0) {
      return out;
    }
    const double first = std::ceil(1.0 / hi);
    const double last = std::floor(1.0 / lo);
    constexpr double kMaxJumps = 4e6;
    if (last - first > kMaxJumps) {
      return out;
    }
    for (double j = last; j >= first && j >= 1.0; j -= 1.0) {
      const double t = 1.0 / j;
      if (t > lo && t < hi) {
        out.push_back(t);
      }
    }
    if (cutoff > 0.0 && cutoff < hi) {
      out.push_back(cutoff);
    }
    return out;
  };
  return RadialWeight{n, q, jumps, cap_m > 0.0 ? "example1-truncated" : "example1"};
}

RadialWeight example2_weight(int n, double m) {
  require_dimension(n);
  if (!(m >= 1.0)) {
    throw DomainError("example 2 truncation parameter m must be >= 1");
  }
  const double cutoff = std::isinf(m) ? 0.0 : 1.0 / m;
  auto q = [n, cutoff](double t) { return t <= cutoff ? 1.0 : std::pow(t, -static_cast<double>(n)); };
  auto jumps = [cutoff](double lo, double hi) {
    std::vector<double> out;
    if (cutoff > lo && cutoff < hi) {
      out.push_back(cutoff);
    }
    return out;
  };
  return RadialWeight{n, q, jumps, std::isinf(m) ? "example2-limit" : "example2"};
}

// ---------------------------------------------------------------------------
// Spherical means and Lehto integrals

double spherical_mean(const Density& Q, std::span<const double> y0, double r, const QuadratureConfig& cfg) {
  const int n = Q.dimension();
  if (!(r > 0.0)) {
    throw DomainError("spherical mean needs r > 0");
  }
  if (y0.size() != static_cast<std::size_t>(n)) {
    throw DomainError("center dimension does not match density dimension");
  }
  if (Q.is_radial_about(y0)) {
    return Q.radial_value(r);
  }
  if (n == 2) {
    auto ring = [&](double theta) {
      const double p[2] = {y0[0] + r * std::cos(theta), y0[1] + r * std::sin(theta)};
      return Q(std::span<const double>(p, 2));
    };
    const auto res = adaptive_integral_1d(ring, 0.0, 2.0 * kPi, cfg);
    return res.value / (2.0 * kPi);
  }
  if (n == 3) {
    QuadratureConfig inner = cfg;
    inner.abs_tol = cfg.abs_tol * 0.1;
    inner.rel_tol = cfg.rel_tol * 0.1;
    auto band = [&](double theta) {
      const double st = std::sin(theta);
      const double ct = std::cos(theta);
      auto around = [&](double phi) {
        const double p[3] = {y0[0] + r * st * std::cos(phi), y0[1] + r * st * std::sin(phi), y0[2] + r * ct};
        return Q(std::span<const double>(p, 3));
      };
      const double v = adaptive_integral_1d(around, 0.0, 2.0 * kPi, inner).value;
      return v == kInf ? kInf : v * st;
    };
    const auto res = adaptive_integral_1d(band, 0.0, kPi, cfg);
    return res.value / (4.0 * kPi);
  }
  throw DomainError("spherical means of non-radial densities are supported only for n = 2 and n = 3");
}

double lehto_integral(const RadialWeight& w, double r_lo, double r_hi, const QuadratureConfig& cfg) {
  if (!(r_lo > 0.0) || !(r_lo < r_hi)) {
    throw DomainError("Lehto integral needs 0 < r_lo < r_hi");
  }
  const auto breaks = w.breakpoints(r_lo, r_hi);
  const auto res =
      adaptive_integral_1d([&w](double t) { return lehto_integrand(w, t); }, r_lo, r_hi, cfg, breaks);
  return res.value;
}

// ---------------------------------------------------------------------------
// Profiles

struct RadialProfile::Table {
  std::vector<double> r;
  std::vector<double> rho;
  std::vector<double> slope;

  std::size_t segment(double x) const {
    auto it = std::upper_bound(r.begin(), r.end(), x);
    std::size_t k = static_cast<std::size_t>(std::distance(r.begin(), it));
    return std::clamp<std::size_t>(k == 0 ? 0 : k - 1, 0, r.size() - 2);
  }

  double value(double x) const {
    if (x < r.front()) {
      return rho.front() * x / r.front();
    }
    const std::size_t k = segment(x);
    const double h = r[k + 1] - r[k];
    const double t = (x - r[k]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * rho[k] + (t3 - 2 * t2 + t) * h * slope[k] + (-2 * t3 + 3 * t2) * rho[k + 1] +
           (t3 - t2) * h * slope[k + 1];
  }

  double derivative(double x) const {
    if (x < r.front()) {
      return rho.front() / r.front();
    }
    const std::size_t k = segment(x);
    const double h = r[k + 1] - r[k];
    const double t = (x - r[k]) / h;
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * rho[k] + (6 * t - 6 * t2) * rho[k + 1]) / h + (3 * t2 - 4 * t + 1) * slope[k] +
           (3 * t2 - 2 * t) * slope[k + 1];
  }
};

struct RadialProfile::Numeric {
  RadialWeight weight;
  QuadratureConfig cfg;
  std::vector<double> nodes;    // ascending, last node is 1
  std::vector<double> log_rho;  // -inf where the inner integral diverged

  double log_value(double r) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), r);
    if (it == nodes.end()) {
      return 0.0;
    }
    const auto k = static_cast<std::size_t>(std::distance(nodes.begin(), it));
    if (nodes[k] == r) {
      return log_rho[k];
    }
    if (log_rho[k] == -kInf) {
      return -kInf;
    }
    const double piece = lehto_integral(weight, r, nodes[k], cfg);
    return log_rho[k] - piece;
  }
};

RadialProfile RadialProfile::identity(int n) {
  require_dimension(n);
  return RadialProfile(n, ProfileKind::Identity, "identity");
}

RadialProfile RadialProfile::power(int n, double exponent) {
  require_dimension(n);
  if (!(exponent > 0.0)) {
    throw DomainError("power profile needs a positive exponent");
  }
  return RadialProfile(n, ProfileKind::Power, "power", exponent);
}

RadialProfile RadialProfile::example2(int n, double m) {
  require_dimension(n);
  if (!(m >= 1.0)) {
    throw DomainError("example 2 profile needs m >= 1");
  }
  return RadialProfile(n, ProfileKind::Example2, std::isinf(m) ? "example2-limit" : "example2", m);
}

RadialProfile RadialProfile::example4_limit() {
  auto p = example2(2, kInf);
  p.name_ = "example4-limit";
  return p;
}

RadialProfile RadialProfile::from_table(int n, std::vector<double> r, std::vector<double> rho) {
  require_dimension(n);
  if (r.size() != rho.size() || r.size() < 2) {
    throw InvariantViolation("profile table needs at least two (r, rho) pairs of equal length");
  }
  if (r.front() < 0.0 || std::abs(r.back() - 1.0) > 1e-14 || std::abs(rho.back() - 1.0) > 1e-14) {
    throw InvariantViolation("profile table must lie in [0, 1] and end at (1, 1)");
  }
  for (std::size_t k = 0; k + 1 < r.size(); ++k) {
    if (!(r[k + 1] > r[k])) {
      throw InvariantViolation("profile table radii must be strictly increasing");
    }
    if (!(rho[k + 1] > rho[k])) {
      throw InvariantViolation("profile table is not strictly increasing at r=" + std::to_string(r[k + 1]));
    }
  }
  if (rho.front() < 0.0 || (r.front() > 0.0 && rho.front() <= 0.0)) {
    throw InvariantViolation("profile must be positive for r > 0");
  }

  auto table = std::make_shared<Table>();
  const std::size_t m = r.size();
  std::vector<double> secant(m - 1);
  for (std::size_t k = 0; k + 1 < m; ++k) {
    secant[k] = (rho[k + 1] - rho[k]) / (r[k + 1] - r[k]);
  }
  std::vector<double> slope(m);
  slope.front() = secant.front();
  slope.back() = secant.back();
  for (std::size_t k = 1; k + 1 < m; ++k) {
    const double h0 = r[k] - r[k - 1];
    const double h1 = r[k + 1] - r[k];
    const double w1 = 2.0 * h1 + h0;
    const double w2 = h1 + 2.0 * h0;
    slope[k] = (w1 + w2) / (w1 / secant[k - 1] + w2 / secant[k]);
  }
  table->r = std::move(r);
  table->rho = std::move(rho);
  table->slope = std::move(slope);

  RadialProfile p(n, ProfileKind::Table, "table");
  p.table_ = std::move(table);
  return p;
}

RadialProfile rho_profile(const RadialWeight& w, const QuadratureConfig& cfg) {
  require_dimension(w.n);
  auto data = std::make_shared<RadialProfile::Numeric>();
  data->weight = w;
  data->cfg = cfg;
  constexpr int kPerOctave = 4;
  constexpr int kOctaves = 26;
  for (int k = kPerOctave * kOctaves; k >= 0; --k) {
    data->nodes.push_back(std::exp2(-static_cast<double>(k) / kPerOctave));
  }
  const std::size_t m = data->nodes.size();
  data->log_rho.assign(m, 0.0);
  for (std::size_t k = m - 1; k-- > 0;) {
    if (data->log_rho[k + 1] == -kInf) {
      data->log_rho[k] = -kInf;
      continue;
    }
    const double piece = lehto_integral(w, data->nodes[k], data->nodes[k + 1], cfg);
    data->log_rho[k] = (piece == kInf) ? -kInf : data->log_rho[k + 1] - piece;
  }
  RadialProfile p(w.n, ProfileKind::Numeric, "numeric:" + w.name);
  p.degenerate_ = data->log_rho.front() == -kInf;
  p.numeric_ = std::move(data);
  return p;
}

double RadialProfile::value(double r) const {
  if (r < 0.0 || r > 1.0 + 1e-12) {
    throw DomainError("profile argument must lie in [0, 1], got " + std::to_string(r));
  }
  r = std::min(r, 1.0);
  if (r == 0.0) {
    return lower_limit();
  }
  switch (kind_) {
    case ProfileKind::Identity:
      return r;
    case ProfileKind::Power:
      return std::pow(r, param_);
    case ProfileKind::Example2: {
      const double c = static_cast<double>(n_ - 1) / n_;
      const double beta = 1.0 / c;
      const double m = param_;
      if (std::isinf(m) || r >= 1.0 / m) {
        return std::exp(c * (std::pow(r, beta) - 1.0));
      }
      return m * r * std::exp(c * (std::pow(1.0 / m, beta) - 1.0));
    }
    case ProfileKind::Table:
      return table_->value(r);
    case ProfileKind::Numeric: {
      const double lr = numeric_->log_value(r);
      return lr == -kInf ? 0.0 : std::exp(lr);
    }
  }
  return 0.0;
}

double RadialProfile::derivative(double r) const {
  if (!(r > 0.0) || r > 1.0 + 1e-12) {
    throw DomainError("profile derivative needs r in (0, 1]");
  }
  r = std::min(r, 1.0);
  switch (kind_) {
    case ProfileKind::Identity:
      return 1.0;
    case ProfileKind::Power:
      return param_ * std::pow(r, param_ - 1.0);
    case ProfileKind::Example2: {
      const double c = static_cast<double>(n_ - 1) / n_;
      const double m = param_;
      if (std::isinf(m) || r >= 1.0 / m) {
        return value(r) * std::pow(r, 1.0 / static_cast<double>(n_ - 1));
      }
      return m * std::exp(c * (std::pow(1.0 / m, 1.0 / c) - 1.0));
    }
    case ProfileKind::Table:
      return table_->derivative(r);
    case ProfileKind::Numeric: {
      const auto& w = numeric_->weight;
      // Right limit of the weight at jump points.
      const auto near = w.breakpoints(r * (1.0 - 1e-12), r * (1.0 + 1e-12));
      const double t = near.empty() ? r : r * (1.0 + 1e-12);
      return value(r) * lehto_integrand(w, t) * r / t;
    }
  }
  return 0.0;
}

double RadialProfile::lower_limit() const {
  switch (kind_) {
    case ProfileKind::Identity:
    case ProfileKind::Power:
      return 0.0;
    case ProfileKind::Example2:
      return std::isinf(param_) ? std::exp(-static_cast<double>(n_ - 1) / n_) : 0.0;
    case ProfileKind::Table:
      return table_->r.front() == 0.0 ? table_->rho.front() : 0.0;
    case ProfileKind::Numeric: {
      const double lr = numeric_->log_rho.front();
      return lr == -kInf ? 0.0 : std::exp(lr);
    }
  }
  return 0.0;
}

std::vector<double> RadialProfile::kinks() const {
  switch (kind_) {
    case ProfileKind::Example2:
      if (!std::isinf(param_) && param_ > 1.0) {
        return {1.0 / param_};
      }
      return {};
    case ProfileKind::Numeric:
      return numeric_->weight.breakpoints(0.0, 1.0);
    default:
      return {};
  }
}

double RadialProfile::bracketed_inverse(double s) const {
  double lo = 0.0;
  double hi = 1.0;
  double f_lo = lower_limit() - s;
  double f_hi = 1.0 - s;
  if (f_lo == 0.0) {
    return 0.0;
  }
  if (f_hi == 0.0) {
    return 1.0;
  }
  // Illinois-modified regula falsi with a bisection step every third pass.
  int side = 0;
  for (int iter = 0; iter < 300 && hi - lo > 1e-13; ++iter) {
    double x = (iter % 3 == 2) ? 0.5 * (lo + hi) : (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
    if (!(x > lo && x < hi)) {
      x = 0.5 * (lo + hi);
    }
    const double fx = value(x) - s;
    if (fx == 0.0) {
      return x;
    }
    if ((fx < 0.0) == (f_lo < 0.0)) {
      lo = x;
      f_lo = fx;
      if (side == -1) {
        f_hi *= 0.5;
      }
      side = -1;
    } else {
      hi = x;
      f_hi = fx;
      if (side == 1) {
        f_lo *= 0.5;
      }
      side = 1;
    }
  }
  return 0.5 * (lo + hi);
}

double RadialProfile::inverse(double s) const {
  const double floor = lower_limit();
  if (s < floor || s > 1.0 + 1e-12) {
    throw DomainError("radius " + std::to_string(s) + " lies outside the profile range [" + std::to_string(floor) +
                      ", 1]");
  }
  s = std::min(s, 1.0);
  switch (kind_) {
    case ProfileKind::Identity:
      return s;
    case ProfileKind::Power:
      return std::pow(s, 1.0 / param_);
    case ProfileKind::Example2: {
      const double c = static_cast<double>(n_ - 1) / n_;
      const double m = param_;
      const double branch = std::isinf(m) ? floor : std::exp(c * (std::pow(1.0 / m, 1.0 / c) - 1.0));
      if (s >= branch) {
        const double base = 1.0 + std::log(s) / c;
        return std::pow(std::max(base, 0.0), c);
      }
      return s / (m * branch);
    }
    case ProfileKind::Table: {
      const auto& t = *table_;
      if (s < t.rho.front()) {
        return s * t.r.front() / t.rho.front();
      }
      return bracketed_inverse(s);
    }
    case ProfileKind::Numeric:
      return bracketed_inverse(s);
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Maps

std::vector<double> radial_map_eval(const RadialProfile& p, std::span<const double> x) {
  if (x.size() != static_cast<std::size_t>(p.dimension())) {
    throw DomainError("point dimension does not match profile dimension");
  }
  const double r = norm(x);
  if (r > 1.0 + 1e-12) {
    throw DomainError("radial map is defined on the closed unit ball, |x| = " + std::to_string(r));
  }
  std::vector<double> out(x.size(), 0.0);
  if (r == 0.0) {
    return out;
  }
  const double scale = p.value(std::min(r, 1.0)) / r;
  for (std::size_t k = 0; k < x.size(); ++k) {
    out[k] = x[k] * scale;
  }
  return out;
}

cplx radial_map_eval(const RadialProfile& p, cplx z) {
  const double xy[2] = {z.real(), z.imag()};
  const auto out = radial_map_eval(p, std::span<const double>(xy, 2));
  return {out[0], out[1]};
}

std::vector<double> radial_map_invert(const RadialProfile& p, std::span<const double> y) {
  if (y.size() != static_cast<std::size_t>(p.dimension())) {
    throw DomainError("point dimension does not match profile dimension");
  }
  const double s = norm(y);
  std::vector<double> out(y.size(), 0.0);
  if (s == 0.0) {
    return out;
  }
  const double scale = p.inverse(s) / s;
  for (std::size_t k = 0; k < y.size(); ++k) {
    out[k] = y[k] * scale;
  }
  return out;
}

cplx radial_map_invert(const RadialProfile& p, cplx w) {
  const double xy[2] = {w.real(), w.imag()};
  const auto out = radial_map_invert(p, std::span<const double>(xy, 2));
  return {out[0], out[1]};
}

StretchFactors radial_stretch_factors(const RadialProfile& p, double s) {
  if (!(s > 0.0 && s < 1.0)) {
    throw DomainError("stretch factors need s in (0, 1)");
  }
  StretchFactors out;
  out.tangential = p.value(s) / s;
  out.radial = p.derivative(s);
  for (double k : p.kinks()) {
    if (std::abs(k - s) <= 1e-12 * std::max(1.0, k)) {
      out.kink = true;
    }
  }
  return out;
}

double radial_K_Ip(const RadialProfile& p, double s, double order_p) {
  if (!(order_p > 1.0 && order_p <= 2.0)) {
    throw DomainError("order p must lie in (1, 2]");
  }
  const auto sf = radial_stretch_factors(p, s);
  const double a = sf.tangential;
  const double b = sf.radial;
  if (a == 0.0 && b == 0.0) {
    return 1.0;
  }
  if (a == 0.0 || b == 0.0) {
    return kInf;
  }
  const double lo = std::min(a, b);
  return a * b / std::pow(lo, order_p);
}

double annulus_modulus(int n, double r1, double r2) {
  require_dimension(n);
  if (!(r1 > 0.0) || !(r1 < r2)) {
    throw DomainError("annulus modulus needs 0 < r1 < r2");
  }
  return unit_sphere_area(n) / std::pow(std::log(r2 / r1), n - 1);
}

PoletskyReport inverse_poletsky_check(const RadialProfile& p, const RadialWeight& w, double r1, double r2,
                                      const QuadratureConfig& cfg) {
  if (!(r1 > 0.0) || !(r1 < r2) || r2 > 1.0) {
    throw DomainError("inverse Poletsky check needs 0 < r1 < r2 <= 1");
  }
  if (w.n != p.dimension()) {
    throw DomainError("weight and profile dimensions differ");
  }
  PoletskyReport rep;
  rep.preimage_r1 = p.inverse(r1);
  rep.preimage_r2 = p.inverse(r2);
  rep.lhs = annulus_modulus(p.dimension(), rep.preimage_r1, rep.preimage_r2);
  rep.lehto = lehto_integral(w, r1, r2, cfg);
  if (rep.lehto == 0.0) {
    rep.rhs = kInf;
    rep.holds = true;
    rep.degenerate = true;
    return rep;
  }
  rep.rhs = unit_sphere_area(p.dimension()) / std::pow(rep.lehto, p.dimension() - 1);
  rep.holds = rep.lhs <= rep.rhs * (1.0 + 1e-9);
  return rep;
}

}  // namespace beltrami
