#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "beltrami/numerics.hpp"

namespace beltrami {

/// Extended-nonnegative function Q on R^n (values may be +inf). Radial
/// densities remember their center so spherical means about it reduce to a
/// single evaluation.
class Density {
 public:
  using PointFn = std::function<double(std::span<const double>)>;
  using RadialFn = std::function<double(double)>;

  static Density general(int n, PointFn fn);
  static Density radial(int n, RadialFn fn, std::vector<double> center = {});
  /// Planar convenience wrapper.
  static Density planar(std::function<double(cplx)> fn);

  int dimension() const noexcept { return n_; }
  double operator()(std::span<const double> x) const;
  double at(cplx z) const;

  bool is_radial() const noexcept { return static_cast<bool>(radial_); }
  bool is_radial_about(std::span<const double> y0) const;
  /// Q as a function of distance from the center; only for radial densities.
  double radial_value(double r) const { return radial_(r); }
  const std::vector<double>& center() const noexcept { return center_; }

 private:
  int n_ = 2;
  PointFn point_;
  RadialFn radial_;
  std::vector<double> center_;
};

/// Spherical mean q(r) of some Q, as a function of radius, in dimension n.
struct RadialWeight {
  int n = 2;
  std::function<double(double)> q;
  /// Points in (lo, hi) where q jumps; optional.
  std::function<std::vector<double>(double, double)> jumps;
  std::string name;

  double operator()(double t) const { return q(t); }
  std::vector<double> breakpoints(double lo, double hi) const;
};

RadialWeight constant_weight(int n, double value = 1.0);
/// q(t) = t^{-exponent}.
RadialWeight power_weight(int n, double exponent);
/// Piecewise weight built from {1, t^{-n}} on alternating harmonic intervals;
/// with cap_m > 0 it is replaced by 1 on t <= 1/cap_m.
RadialWeight example1_weight(int n, double cap_m = 0.0);
/// q(t) = t^{-n}, replaced by 1 on t <= 1/m (m = inf keeps the pure power).
RadialWeight example2_weight(int n, double m);
/// The radial function phi behind example1_weight, i.e. Q(x) = phi(|x|).
double example1_phi(double t, int n);
Density example1_density(int n);

/// Extended weight at t; q(t) = inf when the underlying density is infinite on
/// a positive-measure part of the sphere.
double spherical_mean(const Density& Q, std::span<const double> y0, double r, const QuadratureConfig& cfg = {});

/// Lehto-type integral of dt / (t q^{1/(n-1)}(t)) over [r_lo, r_hi], using
/// a / inf = 0 and a / 0 = inf.
double lehto_integral(const RadialWeight& w, double r_lo, double r_hi, const QuadratureConfig& cfg = {});

enum class ProfileKind { Identity, Power, Example2, Table, Numeric };

/// Strictly increasing radial stretch rho on [0, 1] with rho(1) = 1 in
/// dimension n. Closed forms are preferred; Table profiles use monotone cubic
/// Hermite interpolation and Numeric profiles integrate their weight on demand.
class RadialProfile {
 public:
  static RadialProfile identity(int n);
  static RadialProfile power(int n, double exponent);
  /// Stretch generated by example2_weight(n, m). m may be +inf (the limit).
  static RadialProfile example2(int n, double m);
  /// exp((s^2 - 1) / 2); coincides with example2(2, inf).
  static RadialProfile example4_limit();
  static RadialProfile from_table(int n, std::vector<double> r, std::vector<double> rho);

  int dimension() const noexcept { return n_; }
  ProfileKind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }
  double parameter() const noexcept { return param_; }

  double value(double r) const;
  /// Right derivative at kinks.
  double derivative(double r) const;
  double inverse(double s) const;
  /// lim_{r -> 0+} rho(r).
  double lower_limit() const;
  std::vector<double> kinks() const;
  bool degenerate() const noexcept { return degenerate_; }

  friend RadialProfile rho_profile(const RadialWeight& w, const QuadratureConfig& cfg);

 private:
  struct Table;
  struct Numeric;

  RadialProfile(int n, ProfileKind kind, std::string name, double param = 0.0)
      : n_(n), kind_(kind), name_(std::move(name)), param_(param) {}

  double bracketed_inverse(double s) const;

  int n_;
  ProfileKind kind_;
  std::string name_;
  double param_;
  bool degenerate_ = false;
  std::shared_ptr<const Table> table_;
  std::shared_ptr<const Numeric> numeric_;
};

/// rho(r) = exp(-int_r^1 dt / (t q^{1/(n-1)}(t))). Divergence of the inner
/// integral yields rho(r) = 0 and marks the profile degenerate.
RadialProfile rho_profile(const RadialWeight& w, const QuadratureConfig& cfg = {});

/// (x / |x|) rho(|x|), with 0 mapped to 0.
std::vector<double> radial_map_eval(const RadialProfile& p, std::span<const double> x);
cplx radial_map_eval(const RadialProfile& p, cplx z);
std::vector<double> radial_map_invert(const RadialProfile& p, std::span<const double> y);
cplx radial_map_invert(const RadialProfile& p, cplx w);

struct StretchFactors {
  double tangential = 0.0;
  double radial = 0.0;
  bool kink = false;
};

StretchFactors radial_stretch_factors(const RadialProfile& p, double s);

/// (delta_tau * delta_r) / min(delta_tau, delta_r)^p with the edge conventions
/// 1 when both stretches vanish and inf when only one does.
double radial_K_Ip(const RadialProfile& p, double s, double order_p);

/// Modulus of the family of paths joining the boundary spheres of the ring
/// r1 < |x| < r2 in R^n.
double annulus_modulus(int n, double r1, double r2);

struct PoletskyReport {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
  bool degenerate = false;
  double preimage_r1 = 0.0;
  double preimage_r2 = 0.0;
  double lehto = 0.0;
};

/// Compares the modulus of the ring family through the radial map against the
/// bound omega_{n-1} / I^{n-1} from the weight's Lehto integral over [r1, r2].
PoletskyReport inverse_poletsky_check(const RadialProfile& p, const RadialWeight& w, double r1, double r2,
                                      const QuadratureConfig& cfg = {});

}  // namespace beltrami
