#pragma once

#include <memory>
#include <span>
#include <vector>

#include "beltrami/numerics.hpp"

namespace beltrami {

/// FFT workspace for the planar Cauchy and Beurling transforms on one grid.
///
/// Data are zero-padded onto a square lattice of twice the grid extent and
/// multiplied by -2i/xi (Cauchy) or conj(xi)/xi (Beurling). With
/// `lattice_correction` the leading periodization error is removed using
/// the Eisenstein sums of the square lattice and low-order moments of h.
class SpectralWorkspace {
 public:
  explicit SpectralWorkspace(const GridSpec& grid, bool lattice_correction = true);
  ~SpectralWorkspace();
  SpectralWorkspace(const SpectralWorkspace&) = delete;
  SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

  const GridSpec& grid() const noexcept { return grid_; }
  std::size_t fft_size() const noexcept { return n_fft_; }
  /// Side length of the periodization lattice.
  double period() const noexcept { return period_; }

  /// Unchecked kernels used inside iterations; spans have grid().size() entries.
  void beurling(std::span<const cplx> h, std::span<cplx> out);
  void cauchy(std::span<const cplx> h, std::span<cplx> out);

 private:
  struct Fft;

  void apply(std::span<const cplx> h, std::span<cplx> out, const std::vector<cplx>& multiplier);
  /// Adds the polynomial sum_e poly[e] z^e evaluated at every node.
  void add_moment_polynomial(std::span<cplx> out, const std::vector<cplx>& poly, int degree) const;
  std::vector<cplx> moments(std::span<const cplx> h, int max_power) const;

  GridSpec grid_;
  bool corrected_;
  std::size_t n_fft_;
  double period_;
  std::vector<cplx> beurling_multiplier_;
  std::vector<cplx> cauchy_multiplier_;
  std::unique_ptr<Fft> fft_;
};

/// Throws PaddingError when h is not negligible on the outer frame of its grid.
void check_support(const ComplexField& h, double relative_floor = 1e-5);

/// Both transforms require dx == dy and h vanishing near the grid boundary.
ComplexField cauchy_transform(const ComplexField& h, bool lattice_correction = true);
ComplexField beurling_transform(const ComplexField& h, bool lattice_correction = true);

/// G_4, G_8, G_12 of the unit square lattice Z + iZ.
double lattice_sum(int order);

}  // namespace beltrami
