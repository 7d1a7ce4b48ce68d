#include "beltrami/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

#include "beltrami/error.hpp"

namespace beltrami {

GridSpec GridSpec::square(std::size_t n, double half_width) {
  if (n < 2 || !(half_width > 0.0)) {
    throw InvalidGrid("square grid needs n >= 2 and a positive half width");
  }
  const double h = 2.0 * half_width / static_cast<double>(n - 1);
  return GridSpec{n, n, -half_width, -half_width, h, h};
}

void GridSpec::validate(std::size_t min_count) const {
  if (nx < min_count || ny < min_count) {
    throw InvalidGrid("grid needs at least " + std::to_string(min_count) + " samples per axis, got " +
                      std::to_string(nx) + "x" + std::to_string(ny));
  }
  if (!(dx > 0.0) || !(dy > 0.0) || !std::isfinite(dx) || !std::isfinite(dy)) {
    throw InvalidGrid("grid spacings must be positive and finite");
  }
  if (!std::isfinite(x_min) || !std::isfinite(y_min)) {
    throw InvalidGrid("grid origin must be finite");
  }
}

bool GridSpec::covers_square(double half) const noexcept {
  constexpr double slack = 1e-12;
  return x_min <= -half + slack && y_min <= -half + slack && x_max() >= half - slack &&
         y_max() >= half - slack;
}

ComplexField::ComplexField(GridSpec grid, bool extended)
    : grid_(grid), samples_(grid.size()), extended_(extended) {}

ComplexField::ComplexField(GridSpec grid, std::vector<cplx> samples, bool extended)
    : grid_(grid), samples_(std::move(samples)), extended_(extended) {
  if (samples_.size() != grid_.size()) {
    throw InvalidGrid("sample count " + std::to_string(samples_.size()) + " does not match grid size " +
                      std::to_string(grid_.size()));
  }
}

bool ComplexField::all_finite() const noexcept {
  return std::all_of(samples_.begin(), samples_.end(), [](const cplx& v) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  });
}

cplx ComplexField::interpolate(cplx z) const {
  const double u = std::clamp((z.real() - grid_.x_min) / grid_.dx, 0.0, static_cast<double>(grid_.nx - 1));
  const double v = std::clamp((z.imag() - grid_.y_min) / grid_.dy, 0.0, static_cast<double>(grid_.ny - 1));
  const auto i0 = std::min(static_cast<std::size_t>(u), grid_.nx - 2);
  const auto j0 = std::min(static_cast<std::size_t>(v), grid_.ny - 2);
  const double s = u - static_cast<double>(i0);
  const double t = v - static_cast<double>(j0);
  const cplx a = (*this)(i0, j0);
  const cplx b = (*this)(i0 + 1, j0);
  const cplx c = (*this)(i0, j0 + 1);
  const cplx d = (*this)(i0 + 1, j0 + 1);
  return (1.0 - t) * ((1.0 - s) * a + s * b) + t * ((1.0 - s) * c + s * d);
}

ComplexField& ComplexField::operator+=(const ComplexField& other) {
  if (!(other.grid_ == grid_)) {
    throw InvalidGrid("cannot add fields sampled on different grids");
  }
  for (std::size_t k = 0; k < samples_.size(); ++k) {
    samples_[k] += other.samples_[k];
  }
  return *this;
}

ComplexField& ComplexField::operator*=(cplx scale) {
  for (auto& v : samples_) {
    v *= scale;
  }
  return *this;
}

ComplexField operator+(ComplexField a, const ComplexField& b) { return a += b; }
ComplexField operator*(cplx scale, ComplexField a) { return a *= scale; }

void QuadratureConfig::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
    throw DomainError("quadrature tolerances must be positive");
  }
  if (max_depth < 1 || max_depth > 60) {
    throw DomainError("quadrature max_depth must lie in [1, 60]");
  }
}

std::pair<ComplexField, ComplexField> wirtinger_derivatives(const ComplexField& field) {
  const GridSpec& g = field.grid();
  if (g.nx < 3 || g.ny < 3) {
    throw InvalidGrid("Wirtinger derivatives need at least 3x3 samples");
  }
  if (!(g.dx > 0.0) || !(g.dy > 0.0)) {
    throw InvalidGrid("grid spacings must be positive");
  }

  auto diff = [](const cplx& m2, const cplx& m1, const cplx& c, const cplx& p1, const cplx& p2, int where,
                 double h) -> cplx {
    switch (where) {
      case -1:  // forward at the low edge
        return (-3.0 * c + 4.0 * p1 - p2) / (2.0 * h);
      case 1:  // backward at the high edge
        return (3.0 * c - 4.0 * m1 + m2) / (2.0 * h);
      default:
        return (p1 - m1) / (2.0 * h);
    }
  };

  ComplexField fz(g);
  ComplexField fzb(g);
  const cplx zero{};
  for (std::size_t j = 0; j < g.ny; ++j) {
    for (std::size_t i = 0; i < g.nx; ++i) {
      cplx fx;
      if (i == 0) {
        fx = diff(zero, zero, field(0, j), field(1, j), field(2, j), -1, g.dx);
      } else if (i + 1 == g.nx) {
        fx = diff(field(i - 2, j), field(i - 1, j), field(i, j), zero, zero, 1, g.dx);
      } else {
        fx = diff(zero, field(i - 1, j), field(i, j), field(i + 1, j), zero, 0, g.dx);
      }
      cplx fy;
      if (j == 0) {
        fy = diff(zero, zero, field(i, 0), field(i, 1), field(i, 2), -1, g.dy);
      } else if (j + 1 == g.ny) {
        fy = diff(field(i, j - 2), field(i, j - 1), field(i, j), zero, zero, 1, g.dy);
      } else {
        fy = diff(zero, field(i, j - 1), field(i, j), field(i, j + 1), zero, 0, g.dy);
      }
      const cplx ify = cplx(0.0, 1.0) * fy;
      fz(i, j) = 0.5 * (fx - ify);
      fzb(i, j) = 0.5 * (fx + ify);
    }
  }
  return {std::move(fz), std::move(fzb)};
}

namespace {

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1].
constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  double value;
  double error;
  int depth;
  bool operator<(const Panel& other) const { return error < other.error; }
};

Panel gauss_kronrod(const std::function<double(double)>& f, double a, double b, int depth,
                    std::size_t& evals) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double fv1[7];
  double fv2[7];
  double kronrod = kWgk[7] * fc;
  double gauss = kWg[3] * fc;
  for (int k = 0; k < 7; ++k) {
    const double dxk = half * kXgk[k];
    fv1[k] = f(center - dxk);
    fv2[k] = f(center + dxk);
    const double sum = fv1[k] + fv2[k];
    kronrod += kWgk[k] * sum;
    if (k % 2 == 1) {
      gauss += kWg[k / 2] * sum;
    }
  }
  evals += 15;
  if (std::isnan(kronrod)) {
    throw DomainError("integrand returned NaN on [" + std::to_string(a) + ", " + std::to_string(b) + "]");
  }
  // QUADPACK-style scaled error estimate
  const double mean = 0.5 * kronrod;
  double abs_int = kWgk[7] * std::abs(fc);
  double asc = kWgk[7] * std::abs(fc - mean);
  for (int k = 0; k < 7; ++k) {
    abs_int += kWgk[k] * (std::abs(fv1[k]) + std::abs(fv2[k]));
    asc += kWgk[k] * (std::abs(fv1[k] - mean) + std::abs(fv2[k] - mean));
  }
  kronrod *= half;
  gauss *= half;
  abs_int *= std::abs(half);
  asc *= std::abs(half);
  double err = std::abs(kronrod - gauss);
  if (asc != 0.0 && err != 0.0) {
    err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
  }
  const double eps = std::numeric_limits<double>::epsilon();
  if (abs_int > std::numeric_limits<double>::min() / (50.0 * eps)) {
    err = std::max(50.0 * eps * abs_int, err);
  }
  return Panel{a, b, kronrod, err, depth};
}

}  // namespace

QuadratureResult adaptive_integral_1d(const std::function<double(double)>& f, double a, double b,
                                      const QuadratureConfig& cfg, std::span<const double> breakpoints) {
  cfg.validate();
  if (!(a < b)) {
    throw DomainError("adaptive_integral_1d requires a < b");
  }

  std::vector<double> cuts{a};
  for (double c : breakpoints) {
    if (c > a && c < b) {
      cuts.push_back(c);
    }
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  constexpr double inf = std::numeric_limits<double>::infinity();
  constexpr std::size_t kMaxPanels = 2'000'000;

  QuadratureResult out;
  std::priority_queue<Panel> heap;
  double total = 0.0;
  double total_err = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    Panel p = gauss_kronrod(f, cuts[k], cuts[k + 1], 0, out.evaluations);
    if (p.value == inf) {
      return {inf, inf, out.evaluations};
    }
    total += p.value;
    total_err += p.error;
    heap.push(p);
  }

  while (total_err > std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total))) {
    Panel worst = heap.top();
    if (worst.depth >= cfg.max_depth || heap.size() >= kMaxPanels) {
      throw NonConvergence("adaptive quadrature exceeded max_depth on [" + std::to_string(worst.a) + ", " +
                               std::to_string(worst.b) + "]",
                           total, total_err);
    }
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    Panel left = gauss_kronrod(f, worst.a, mid, worst.depth + 1, out.evaluations);
    Panel right = gauss_kronrod(f, mid, worst.b, worst.depth + 1, out.evaluations);
    if (left.value == inf || right.value == inf) {
      return {inf, inf, out.evaluations};
    }
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    // Running sums drift; recompute occasionally.
    if (heap.size() % 4096 == 0) {
      auto copy = heap;
      total = 0.0;
      total_err = 0.0;
      while (!copy.empty()) {
        total += copy.top().value;
        total_err += copy.top().error;
        copy.pop();
      }
    }
  }

  // Final sum in a stable order.
  std::vector<Panel> panels;
  panels.reserve(heap.size());
  while (!heap.empty()) {
    panels.push_back(heap.top());
    heap.pop();
  }
  std::sort(panels.begin(), panels.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  out.value = 0.0;
  out.error = 0.0;
  for (const auto& p : panels) {
    out.value += p.value;
    out.error += p.error;
  }
  return out;
}

double unit_sphere_area(int n) {
  if (n < 2) {
    throw DomainError("unit sphere area needs dimension n >= 2");
  }
  const double half = 0.5 * static_cast<double>(n);
  return 2.0 * std::pow(kPi, half) / std::tgamma(half);
}

double unit_ball_volume(int n) { return unit_sphere_area(n) / static_cast<double>(n); }

}  // namespace beltrami
