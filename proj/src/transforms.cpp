#include "beltrami/transforms.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <string>

#include "beltrami/error.hpp"

namespace beltrami {

namespace {

// FFTW planning is not thread-safe; execution on distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

double binomial(int n, int k) {
  double out = 1.0;
  for (int i = 1; i <= k; ++i) {
    out = out * static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return out;
}

void require_square_cells(const GridSpec& g) {
  g.validate(8);
  if (std::abs(g.dx - g.dy) > 1e-12 * g.dx) {
    throw InvalidGrid("transforms need square cells (dx == dy)");
  }
}

constexpr int kOrders[3] = {4, 8, 12};

}  // namespace

double lattice_sum(int order) {
  const double g4 = std::pow(std::tgamma(0.25), 8) / (960.0 * kPi * kPi);
  const double g8 = 3.0 / 7.0 * g4 * g4;
  switch (order) {
    case 4:
      return g4;
    case 8:
      return g8;
    case 12:
      return 126.0 / 429.0 * g4 * g8;
    default:
      throw DomainError("lattice sums are tabulated for orders 4, 8, 12 only");
  }
}

struct SpectralWorkspace::Fft {
  fftw_complex* buffer = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  explicit Fft(std::size_t n) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    buffer = fftw_alloc_complex(n * n);
    if (buffer == nullptr) {
      throw Error("FFT buffer allocation failed");
    }
    const int ni = static_cast<int>(n);
    forward = fftw_plan_dft_2d(ni, ni, buffer, buffer, FFTW_FORWARD, FFTW_ESTIMATE);
    backward = fftw_plan_dft_2d(ni, ni, buffer, buffer, FFTW_BACKWARD, FFTW_ESTIMATE);
  }

  ~Fft() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
    fftw_free(buffer);
  }

  cplx* data() { return reinterpret_cast<cplx*>(buffer); }
};

SpectralWorkspace::SpectralWorkspace(const GridSpec& grid, bool lattice_correction)
    : grid_(grid), corrected_(lattice_correction) {
  require_square_cells(grid);
  n_fft_ = 2 * std::max(grid.nx, grid.ny);
  period_ = static_cast<double>(n_fft_) * grid.dx;
  fft_ = std::make_unique<Fft>(n_fft_);

  const std::size_t n = n_fft_;
  beurling_multiplier_.assign(n * n, 0.0);
  cauchy_multiplier_.assign(n * n, 0.0);
  const double scale = 2.0 * kPi / period_;
  const double norm = 1.0 / static_cast<double>(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    const double ky = scale * (j < n / 2 ? static_cast<double>(j) : static_cast<double>(j) - static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
      const double kx =
          scale * (i < n / 2 ? static_cast<double>(i) : static_cast<double>(i) - static_cast<double>(n));
      // Nyquist bins alias onto themselves; dropping them keeps the kernels symmetric
      if ((i == 0 && j == 0) || i == n / 2 || j == n / 2) {
        continue;
      }
      const cplx xi(kx, ky);
      beurling_multiplier_[j * n + i] = norm * std::conj(xi) / xi;
      cauchy_multiplier_[j * n + i] = norm * cplx(0.0, -2.0) / xi;
    }
  }
}

SpectralWorkspace::~SpectralWorkspace() = default;

std::vector<cplx> SpectralWorkspace::moments(std::span<const cplx> h, int max_power) const {
  std::vector<cplx> m(static_cast<std::size_t>(max_power) + 2, 0.0);  // last slot: conj moment
  const double area = grid_.dx * grid_.dy;
  for (std::size_t j = 0; j < grid_.ny; ++j) {
    for (std::size_t i = 0; i < grid_.nx; ++i) {
      const cplx v = h[grid_.index(i, j)];
      if (v == cplx{}) {
        continue;
      }
      const cplx z = grid_.point(i, j);
      cplx zp = 1.0;
      for (int p = 0; p <= max_power; ++p) {
        m[static_cast<std::size_t>(p)] += v * zp;
        zp *= z;
      }
      m.back() += v * std::conj(z);
    }
  }
  for (auto& v : m) {
    v *= area;
  }
  return m;
}

void SpectralWorkspace::add_moment_polynomial(std::span<cplx> out, const std::vector<cplx>& poly, int degree) const {
  for (std::size_t j = 0; j < grid_.ny; ++j) {
    for (std::size_t i = 0; i < grid_.nx; ++i) {
      const cplx z = grid_.point(i, j);
      cplx acc = poly[static_cast<std::size_t>(degree)];
      for (int e = degree - 1; e >= 0; --e) {
        acc = acc * z + poly[static_cast<std::size_t>(e)];
      }
      out[grid_.index(i, j)] += acc;
    }
  }
}

void SpectralWorkspace::apply(std::span<const cplx> h, std::span<cplx> out, const std::vector<cplx>& multiplier) {
  if (h.size() != grid_.size() || out.size() != grid_.size()) {
    throw InvalidGrid("transform input size does not match the workspace grid");
  }
  const std::size_t n = n_fft_;
  cplx* buf = fft_->data();
  std::fill(buf, buf + n * n, cplx{});
  for (std::size_t j = 0; j < grid_.ny; ++j) {
    std::copy_n(h.data() + j * grid_.nx, grid_.nx, buf + j * n);
  }
  fftw_execute(fft_->forward);
  for (std::size_t k = 0; k < n * n; ++k) {
    buf[k] *= multiplier[k];
  }
  fftw_execute(fft_->backward);
  for (std::size_t j = 0; j < grid_.ny; ++j) {
    std::copy_n(buf + j * n, grid_.nx, out.data() + j * grid_.nx);
  }
}

void SpectralWorkspace::beurling(std::span<const cplx> h, std::span<cplx> out) {
  apply(h, out, beurling_multiplier_);
  if (!corrected_) {
    return;
  }
  const auto m = moments(h, 10);
  std::vector<cplx> poly(11, 0.0);
  for (int k : kOrders) {
    const int e = k - 2;
    const double c = (k - 1) * lattice_sum(k) / std::pow(period_, k) / kPi;
    for (int j = 0; j <= e; ++j) {
      const double sign = (j % 2 == 0) ? 1.0 : -1.0;
      poly[static_cast<std::size_t>(e - j)] += c * binomial(e, j) * sign * m[static_cast<std::size_t>(j)];
    }
  }
  add_moment_polynomial(out, poly, 10);
}

void SpectralWorkspace::cauchy(std::span<const cplx> h, std::span<cplx> out) {
  apply(h, out, cauchy_multiplier_);
  if (!corrected_) {
    return;
  }
  const auto m = moments(h, 11);
  const double p2 = period_ * period_;
  const cplx m0 = m[0];
  const cplx mbar = m.back();
  for (std::size_t j = 0; j < grid_.ny; ++j) {
    for (std::size_t i = 0; i < grid_.nx; ++i) {
      out[grid_.index(i, j)] += (std::conj(grid_.point(i, j)) * m0 - mbar) / p2;
    }
  }
  std::vector<cplx> poly(12, 0.0);
  for (int k : kOrders) {
    const int e = k - 1;
    const double c = lattice_sum(k) / std::pow(period_, k) / kPi;
    for (int j = 0; j <= e; ++j) {
      const double sign = (j % 2 == 0) ? 1.0 : -1.0;
      poly[static_cast<std::size_t>(e - j)] += c * binomial(e, j) * sign * m[static_cast<std::size_t>(j)];
    }
  }
  add_moment_polynomial(out, poly, 11);
}

void check_support(const ComplexField& h, double relative_floor) {
  const GridSpec& g = h.grid();
  double peak = 0.0;
  for (const auto& v : h.samples()) {
    peak = std::max(peak, std::abs(v));
  }
  if (peak == 0.0) {
    return;
  }
  double edge = 0.0;
  for (std::size_t i = 0; i < g.nx; ++i) {
    edge = std::max({edge, std::abs(h(i, 0)), std::abs(h(i, g.ny - 1))});
  }
  for (std::size_t j = 0; j < g.ny; ++j) {
    edge = std::max({edge, std::abs(h(0, j)), std::abs(h(g.nx - 1, j))});
  }
  if (edge > relative_floor * peak) {
    throw PaddingError("transform input reaches the grid boundary (edge/peak = " + std::to_string(edge / peak) +
                       ")");
  }
}

ComplexField cauchy_transform(const ComplexField& h, bool lattice_correction) {
  check_support(h);
  SpectralWorkspace ws(h.grid(), lattice_correction);
  ComplexField out(h.grid());
  ws.cauchy(h.samples(), out.samples());
  return out;
}

ComplexField beurling_transform(const ComplexField& h, bool lattice_correction) {
  check_support(h);
  SpectralWorkspace ws(h.grid(), lattice_correction);
  ComplexField out(h.grid());
  ws.beurling(h.samples(), out.samples());
  return out;
}

}  // namespace beltrami
