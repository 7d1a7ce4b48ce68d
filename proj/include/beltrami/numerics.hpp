#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace beltrami {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// Uniform planar sampling. Node (i, j) sits at (x_min + i*dx, y_min + j*dy);
/// storage is row-major with y as the outer index.
struct GridSpec {
  std::size_t nx = 0;
  std::size_t ny = 0;
  double x_min = 0.0;
  double y_min = 0.0;
  double dx = 0.0;
  double dy = 0.0;

  /// n x n nodes covering [-half_width, half_width]^2 including both edges.
  static GridSpec square(std::size_t n, double half_width);

  /// Throws InvalidGrid unless spacings are positive and both counts reach
  /// `min_count`.
  void validate(std::size_t min_count = 8) const;

  std::size_t size() const noexcept { return nx * ny; }
  std::size_t index(std::size_t i, std::size_t j) const noexcept { return j * nx + i; }
  double x(std::size_t i) const noexcept { return x_min + static_cast<double>(i) * dx; }
  double y(std::size_t j) const noexcept { return y_min + static_cast<double>(j) * dy; }
  cplx point(std::size_t i, std::size_t j) const noexcept { return {x(i), y(j)}; }
  double x_max() const noexcept { return x(nx - 1); }
  double y_max() const noexcept { return y(ny - 1); }

  /// True when the sampled rectangle contains [-half, half]^2.
  bool covers_square(double half) const noexcept;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Complex samples on a GridSpec. Extended fields may hold infinities (used for
/// dilatation-valued fields); ordinary fields are expected to be finite.
class ComplexField {
 public:
  ComplexField() = default;
  explicit ComplexField(GridSpec grid, bool extended = false);
  ComplexField(GridSpec grid, std::vector<cplx> samples, bool extended = false);

  template <typename F>
  static ComplexField from_function(const GridSpec& grid, F&& fn) {
    ComplexField out(grid);
    for (std::size_t j = 0; j < grid.ny; ++j) {
      for (std::size_t i = 0; i < grid.nx; ++i) {
        out.samples_[grid.index(i, j)] = fn(grid.point(i, j));
      }
    }
    return out;
  }

  const GridSpec& grid() const noexcept { return grid_; }
  std::span<const cplx> samples() const noexcept { return samples_; }
  std::span<cplx> samples() noexcept { return samples_; }
  std::vector<cplx>& data() noexcept { return samples_; }
  const std::vector<cplx>& data() const noexcept { return samples_; }

  cplx& operator()(std::size_t i, std::size_t j) noexcept { return samples_[grid_.index(i, j)]; }
  const cplx& operator()(std::size_t i, std::size_t j) const noexcept {
    return samples_[grid_.index(i, j)];
  }

  bool extended() const noexcept { return extended_; }
  bool all_finite() const noexcept;

  /// Bilinear interpolation; points outside the grid are clamped to the edge.
  cplx interpolate(cplx z) const;

  ComplexField& operator+=(const ComplexField& other);
  ComplexField& operator*=(cplx scale);

 private:
  GridSpec grid_{};
  std::vector<cplx> samples_;
  bool extended_ = false;
};

ComplexField operator+(ComplexField a, const ComplexField& b);
ComplexField operator*(cplx scale, ComplexField a);

struct QuadratureConfig {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_depth = 50;

  void validate() const;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
};

/// (f_z, f_zbar) by centered differences in the interior and second-order
/// one-sided differences on the edges; exact for affine fields.
std::pair<ComplexField, ComplexField> wirtinger_derivatives(const ComplexField& field);

/// Globally adaptive Gauss-Kronrod (7/15) quadrature on [a, b]. The rule is
/// open, so endpoint singularities are never sampled. Known discontinuities can
/// be passed as `breakpoints`; those outside (a, b) are ignored.
///
/// An integrand value of +inf yields {inf, inf}. Throws NonConvergence when a
/// panel would have to be refined past `cfg.max_depth`.
QuadratureResult adaptive_integral_1d(const std::function<double(double)>& f, double a, double b,
                                      const QuadratureConfig& cfg = {},
                                      std::span<const double> breakpoints = {});

/// Surface area of the unit sphere S^{n-1} in R^n.
double unit_sphere_area(int n);

/// Volume of the unit ball in R^n.
double unit_ball_volume(int n);

}  // namespace beltrami
