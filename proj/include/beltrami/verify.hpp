#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "beltrami/numerics.hpp"
#include "beltrami/radial.hpp"

namespace beltrami {

using PlanarMap = std::function<cplx(cplx)>;

/// |f(x) - f(y)| ln^{1/n}(1 + r0 / (2|x - y|)); 0 when x == y.
double holder_product(const PlanarMap& f, cplx x, cplx y, double r0, int n = 2);

/// 2^{-j} for j = j_min..j_max.
std::vector<double> dyadic_scales(int j_min, int j_max);

struct HolderConfig {
  /// The compact is the closed disk of this radius about `center`.
  double compact_radius = 0.75;
  cplx center{};
  double r0 = 0.25;
  std::vector<double> scales = dyadic_scales(3, 14);
  int pairs_per_scale = 2000;
  int n = 2;
  std::uint64_t seed = 0;
  /// Circles (about `center`) where the map is least regular; half the pairs
  /// straddle them when any lie inside the compact.
  std::vector<double> branch_radii;

  void validate() const;
};

struct HolderReport {
  std::vector<double> scales;
  std::vector<double> per_scale_max_product;
  std::vector<cplx> per_scale_argmax_x;
  std::vector<cplx> per_scale_argmax_y;
  /// max product / q_l1^{1/n}; NaN when q_l1 is missing, zero or infinite.
  double empirical_C = 0.0;
  double q_l1 = 0.0;
  bool q_l1_divergent = false;
  /// False when the three finest maxima grow monotonically by more than 5%.
  bool bounded_flag = true;
};

/// Random pairs at each separation in cfg.scales; deterministic in cfg.seed.
/// q_l1 = +inf marks a divergent L1 norm.
HolderReport holder_scan(const PlanarMap& f, const HolderConfig& cfg, std::optional<double> q_l1 = std::nullopt);

enum class ScanClass { Divergent, Convergent, Inconclusive };
std::string to_string(ScanClass c);

struct LehtoScan {
  std::vector<double> cutoffs;
  /// int_{cutoff}^{delta} dt / (t q^{1/(n-1)}(t)).
  std::vector<double> values;
  ScanClass classification = ScanClass::Inconclusive;
  std::string diagnostics;
};

/// Tracks the Lehto integral of a weight (spherical means about w0) as the
/// lower cutoff decreases and classifies its growth.
LehtoScan lehto_divergence_scan(const RadialWeight& w, double delta, const std::vector<double>& cutoffs,
                                const QuadratureConfig& cfg = {});

struct FmoValue {
  double eps = 0.0;
  double value = 0.0;
  /// The ball integral of Q diverged; value holds a partial estimate.
  bool divergent = false;
};

/// Mean oscillation of Q over B(x0, eps) for each eps. Radial densities about
/// x0 work in any dimension; others only in the plane.
std::vector<FmoValue> fmo_statistic(const Density& Q, std::span<const double> x0, const std::vector<double>& eps_list,
                                    const QuadratureConfig& cfg = {});

}  // namespace beltrami
