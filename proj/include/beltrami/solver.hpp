#pragma once

#include <optional>
#include <vector>

#include "beltrami/dilatation.hpp"
#include "beltrami/numerics.hpp"

namespace beltrami {

struct SolveConfig {
  GridSpec grid = GridSpec::square(512, 2.0);
  double fix_tol = 1e-10;
  int max_iter = 200;
  /// mu is averaged over supersample^2 points per cell.
  int supersample = 8;
  bool lattice_correction = true;

  /// Square cells, >= 8 samples per axis, and coverage of [-1.5, 1.5]^2.
  void validate() const;
};

struct ResidualSummary {
  double linf = 0.0;
  double l2 = 0.0;
  cplx worst_point{};
};

struct SolveResult {
  ComplexField f;
  /// Finite-difference Wirtinger derivatives of f.
  ComplexField f_z;
  ComplexField f_zbar;
  /// Fixed point h = f_zbar and 1 + S h = f_z from the transforms.
  ComplexField h;
  ComplexField f_z_spectral;
  /// Cell-averaged mu used by the iteration.
  ComplexField mu_samples;
  double residual_linf_on_disk = 0.0;
  double residual_l2_on_disk = 0.0;
  cplx residual_worst_point{};
  int iterations = 0;
  double last_step = 0.0;
  MuSpec mu_used;
};

/// Principal solution f = z + C h of f_zbar = mu f_z, where h solves
/// h = mu (1 + S h) by Neumann iteration. mu must be bounded away from 1.
SolveResult solve_principal(const MuSpec& mu, const SolveConfig& cfg = {});

/// |f_zbar - mu f_z| on |z| <= 0.95, skipping two cells on each side of the
/// jump circles of mu.
ResidualSummary residual_report(const SolveResult& res);

/// Finite-difference dilatation f_zbar / f_z compared with mu on |z| <= radius,
/// skipping `band_cells` cells around each jump circle.
struct RecoverySummary {
  double sup_error = 0.0;
  cplx worst_point{};
  std::size_t probes = 0;
};
RecoverySummary dilatation_recovery(const SolveResult& res, double radius = 0.9, double band_cells = 2.0);

/// int (|f_z| + |f_zbar|)^p over the unit disk, i.e. the K_{I,p} integral of
/// the inverse map over the image of the disk.
double KIp_integral_z_route(const SolveResult& res, double order_p);

struct TruncationRun {
  std::vector<double> k_schedule;
  std::vector<SolveResult> per_k;
  /// sup |f_{k_{i+1}} - f_{k_i}| on |z| <= 0.9.
  std::vector<double> pairwise_sup_dist;
  std::vector<double> KIp_integrals;
  std::vector<bool> KIp_finite;
  std::optional<double> bound;
  bool within_bound = true;
};

/// Solves for every truncation mu_k and collects the convergence and K_{I,p}
/// diagnostics. `threads` = 0 uses BELTRAMI_LAB_THREADS or the hardware count.
TruncationRun truncation_scheme(const MuSpec& mu, const std::vector<double>& k_schedule, double order_p,
                                const SolveConfig& cfg = {}, std::optional<double> bound = std::nullopt,
                                unsigned threads = 0);

/// The two closed-form evaluations of int_D K_{I,p}(w, g_k) dm(w): directly in
/// w from the inverse map, and in z from the forward map's stretches.
struct KIpRoutes {
  double w_route = 0.0;
  double z_route = 0.0;
};
KIpRoutes example4_KIp_integral(double k, double order_p, const QuadratureConfig& cfg = {});
KIpRoutes example3_KIp_integral(double alpha, double k, double order_p, const QuadratureConfig& cfg = {});

/// pi + 2 pi / (2 - p).
double example4_KIp_bound(double order_p);

/// Worker count from BELTRAMI_LAB_THREADS (0 or unset means hardware count).
unsigned configured_threads();

}  // namespace beltrami
