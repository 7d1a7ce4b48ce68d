#pragma once

#include <string>
#include <variant>
#include <vector>

#include "beltrami/numerics.hpp"
#include "beltrami/radial.hpp"

namespace beltrami {

struct Example3Mu {
  double alpha = 0.5;
};
struct Example4Mu {};
struct ConstantDiskMu {
  cplx c{};
};
struct GridMu {
  ComplexField field;
};

/// Complex dilatation supported in the closed unit disk (zero outside), with an
/// optional truncation cap k (0 means untruncated).
class MuSpec {
 public:
  using Kind = std::variant<Example3Mu, Example4Mu, ConstantDiskMu, GridMu>;

  /// mu = 0.
  MuSpec() : kind_(ConstantDiskMu{}) {}

  static MuSpec example3(double alpha);
  static MuSpec example4();
  static MuSpec constant_disk(cplx c);
  static MuSpec grid(ComplexField field);

  const Kind& kind() const noexcept { return kind_; }
  std::string name() const;
  double cap() const noexcept { return cap_; }
  bool truncated() const noexcept { return cap_ > 0.0; }

  /// mu(z); zero for |z| >= 1 and on the truncated set.
  cplx operator()(cplx z) const;

  /// Radius below which the truncation zeroes a radial example (0 if none).
  double truncation_radius() const noexcept { return zero_radius_; }
  /// Circles |z| = r across which mu jumps.
  std::vector<double> jump_radii() const;
  /// Essential supremum of |mu| (1 for the untruncated degenerate examples).
  double sup_modulus() const;

  friend MuSpec truncate_mu(const MuSpec& spec, double k);

 private:
  explicit MuSpec(Kind kind) : kind_(std::move(kind)) {}

  cplx raw(cplx z) const;

  Kind kind_;
  double cap_ = 0.0;
  double zero_radius_ = 0.0;
};

/// e^{2i theta} (2r - a(2r-1)) / (2r + a(2r-1)) for 1/2 < r < 1, else 0.
cplx mu_example3(cplx z, double alpha);
/// -e^{2i theta} ln r / (1 + ln r) for e^{-1/2} < r < 1, else 0.
cplx mu_example4(cplx z);

/// (1 + |mu|) / (1 - |mu|), inf at |mu| = 1.
double K_mu(cplx mu);

/// Sets mu to zero wherever K_mu exceeds k.
MuSpec truncate_mu(const MuSpec& spec, double k);

/// Truncation radius (1/2) k a / (k a - 1) of Example 3, capped at 1 (the whole
/// disk is zeroed when k a <= 1).
double example3_truncation_radius(double alpha, double k);
/// Truncation radius e^{(1-k)/(2k)} of Example 4.
double example4_truncation_radius(double k);

/// Closed-form maps. k = 0 selects the untruncated (non-homeomorphic) map.
cplx example3_map(cplx z, double alpha, double k = 0.0);
/// Inverse of the truncated Example 3 map; k = 0 gives y (|y|^a + 1) / (2|y|).
cplx example3_inverse(cplx y, double alpha, double k = 0.0);
cplx example4_map(cplx z, double k = 0.0);
/// Inverse of the truncated Example 4 map; k = 0 gives the limit e^{(|y|^2-1)/2} y/|y|.
cplx example4_inverse(cplx y, double k = 0.0);

/// Majorant of the inverse maps' maximal dilatation: (|y|^a + 1) / (a |y|^a).
Density example3_inverse_Q(double alpha);
/// 1 / |y|^2.
Density example4_inverse_Q();

/// Dilatation of the inverse map at w = f(z): -f_zbar / conj(f_z).
cplx mu_of_inverse(cplx f_z, cplx f_zbar);

/// (|f_z|^2 - |f_zbar|^2) / (|f_z| - |f_zbar|)^p; 1 where both vanish, inf
/// where the Jacobian is nonpositive otherwise.
double K_Ip(cplx f_z, cplx f_zbar, double order_p);
ComplexField K_Ip_field(const ComplexField& f_z, const ComplexField& f_zbar, double order_p);

/// Pointwise f_zbar / f_z (0 where both vanish, inf where only f_z does).
ComplexField dilatation_field(const ComplexField& f_z, const ComplexField& f_zbar);

struct L1Options {
  int min_shells = 12;
  int max_shells = 60;
  /// Divergence needs the last few shell ratios to stay above this.
  double ratio_floor = 0.9;
  /// ... and the partial sum to exceed this multiple of the finest shell.
  double growth_factor = 10.0;
};

struct L1Result {
  double value = 0.0;  // partial sum when divergent
  bool divergent = false;
  /// Dyadic shells [2^{-j-1}, 2^{-j}] from the outside in.
  std::vector<double> shell_inner;
  std::vector<double> shell_sums;
};

/// L1 norm over the unit ball of a radial density given by its weight:
/// omega_{n-1} int_0^1 q(s) s^{n-1} ds, accumulated over dyadic shells.
L1Result l1_norm(const RadialWeight& w, const QuadratureConfig& cfg = {}, const L1Options& opt = {});
/// Planar L1 norm over the unit disk through spherical means about 0.
L1Result l1_norm(const Density& Q, const QuadratureConfig& cfg = {}, const L1Options& opt = {});

struct IntegrabilityScan {
  std::vector<double> radii;
  std::vector<double> means;
  std::vector<bool> finite;
  /// Trapezoidal estimate of the measure of radii with finite mean.
  double finite_measure = 0.0;
};

IntegrabilityScan spherical_integrability_scan(const Density& Q, std::span<const double> y0,
                                               std::span<const double> radii, const QuadratureConfig& cfg = {});

struct DilatationReport {
  double K_mu_max_on_probe = 1.0;
  L1Result l1_norm_Q;
  IntegrabilityScan integrability_scan;
};

/// K_mu maximum on a probe lattice of the disk plus the integrability data of Q.
DilatationReport dilatation_report(const MuSpec& mu, const Density& Q, std::span<const double> radii,
                                   std::size_t probes_per_axis = 201, const QuadratureConfig& cfg = {});

}  // namespace beltrami
