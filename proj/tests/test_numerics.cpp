#include <doctest.h>

#include <cmath>

#include "beltrami/error.hpp"
#include "beltrami/numerics.hpp"

using namespace beltrami;

namespace {

double max_interior_error(const ComplexField& got, const std::function<cplx(cplx)>& exact, std::size_t margin = 1) {
  const auto& g = got.grid();
  double err = 0.0;
  for (std::size_t j = margin; j + margin < g.ny; ++j) {
    for (std::size_t i = margin; i + margin < g.nx; ++i) {
      err = std::max(err, std::abs(got(i, j) - exact(g.point(i, j))));
    }
  }
  return err;
}

}  // namespace

TEST_SUITE("numerics") {
  TEST_CASE("square grid spacing") {
    const auto g = GridSpec::square(512, 2.0);
    CHECK(g.nx == 512);
    CHECK(g.x_min == -2.0);
    CHECK(g.dx == doctest::Approx(4.0 / 511).epsilon(1e-15));
    CHECK(g.covers_square(1.5));
    CHECK_THROWS_AS(GridSpec::square(4, 1.0).validate(), InvalidGrid);
  }

  TEST_CASE("wirtinger derivatives of affine fields are exact") {
    const auto g = GridSpec::square(16, 1.0);
    const auto [fz, fzb] = wirtinger_derivatives(ComplexField::from_function(g, [](cplx z) { return z; }));
    CHECK(max_interior_error(fz, [](cplx) { return cplx(1, 0); }, 0) < 1e-13);
    CHECK(max_interior_error(fzb, [](cplx) { return cplx(0, 0); }, 0) < 1e-13);
    const auto [cz, czb] =
        wirtinger_derivatives(ComplexField::from_function(g, [](cplx z) { return std::conj(z); }));
    CHECK(max_interior_error(cz, [](cplx) { return cplx(0, 0); }, 0) < 1e-13);
    CHECK(max_interior_error(czb, [](cplx) { return cplx(1, 0); }, 0) < 1e-13);
  }

  TEST_CASE("wirtinger derivative of z^2") {
    const auto g = GridSpec::square(256, 1.5);
    const auto [fz, fzb] = wirtinger_derivatives(ComplexField::from_function(g, [](cplx z) { return z * z; }));
    CHECK(max_interior_error(fz, [](cplx z) { return 2.0 * z; }) < 1e-3);
    CHECK(max_interior_error(fzb, [](cplx) { return cplx{}; }) < 1e-10);
  }

  TEST_CASE("wirtinger derivatives reject tiny grids") {
    GridSpec g{2, 2, 0.0, 0.0, 1.0, 1.0};
    CHECK_THROWS_AS(wirtinger_derivatives(ComplexField(g)), InvalidGrid);
  }

  TEST_CASE("wirtinger derivatives are linear") {
    const auto g = GridSpec::square(32, 1.0);
    const auto f = ComplexField::from_function(g, [](cplx z) { return std::exp(z) * std::conj(z); });
    const auto h = ComplexField::from_function(g, [](cplx z) { return std::sin(std::conj(z) * z); });
    const cplx a(0.3, -1.2);
    const cplx b(2.0, 0.5);
    const auto combo = a * f + b * h;
    const auto [fz, fzb] = wirtinger_derivatives(f);
    const auto [hz, hzb] = wirtinger_derivatives(h);
    const auto [cz, czb] = wirtinger_derivatives(combo);
    double err = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      err = std::max(err, std::abs(cz.data()[k] - (a * fz.data()[k] + b * hz.data()[k])));
      err = std::max(err, std::abs(czb.data()[k] - (a * fzb.data()[k] + b * hzb.data()[k])));
    }
    CHECK(err < 1e-11);
  }

  TEST_CASE("centered differences are second order") {
    auto f = [](cplx z) { return std::exp(0.5 * z) + z * std::conj(z) * z; };
    auto fz = [](cplx z) { return 0.5 * std::exp(0.5 * z) + 2.0 * z * std::conj(z); };
    auto err = [&](std::size_t n) {
      const auto [dz, dzb] = wirtinger_derivatives(ComplexField::from_function(GridSpec::square(n, 1.0), f));
      return max_interior_error(dz, fz);
    };
    const double ratio = err(65) / err(129);
    CHECK(ratio >= 3.5);
    CHECK(ratio <= 4.5);
  }

  TEST_CASE("adaptive quadrature examples") {
    CHECK(adaptive_integral_1d([](double t) { return t; }, 0.0, 1.0).value == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(adaptive_integral_1d([](double t) { return 1.0 / t; }, std::exp(-1.0), 1.0).value ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(adaptive_integral_1d([](double t) { return t; }, 0.5, 1.0).value == doctest::Approx(0.375).epsilon(1e-12));
    const auto r = adaptive_integral_1d([](double t) { return -std::log(t); }, 0.0, 1.0);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.error >= 0.0);
  }

  TEST_CASE("adaptive quadrature is additive over splits") {
    auto f = [](double t) { return std::cos(7.0 * t) * std::exp(-t); };
    const auto whole = adaptive_integral_1d(f, 0.0, 3.0);
    const auto left = adaptive_integral_1d(f, 0.0, 1.1);
    const auto right = adaptive_integral_1d(f, 1.1, 3.0);
    CHECK(std::abs(whole.value - left.value - right.value) <= whole.error + left.error + right.error + 1e-12);
  }

  TEST_CASE("adaptive quadrature breakpoints and failures") {
    const double jump[] = {0.3};
    const auto r = adaptive_integral_1d([](double t) { return t < 0.3 ? 1.0 : 5.0; }, 0.0, 1.0, {}, jump);
    CHECK(r.value == doctest::Approx(0.3 + 3.5).epsilon(1e-12));
    QuadratureConfig shallow;
    shallow.max_depth = 3;
    CHECK_THROWS_AS(adaptive_integral_1d([](double t) { return std::sin(1.0 / t); }, 0.0, 1.0, shallow),
                    NonConvergence);
  }

  TEST_CASE("unit sphere area and ball volume") {
    CHECK(unit_sphere_area(2) == doctest::Approx(2.0 * kPi));
    CHECK(unit_sphere_area(3) == doctest::Approx(4.0 * kPi));
    CHECK(unit_sphere_area(4) == doctest::Approx(2.0 * kPi * kPi));
    CHECK(unit_ball_volume(2) == doctest::Approx(kPi));
    CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * kPi / 3.0));
    CHECK_THROWS_AS(unit_sphere_area(1), DomainError);
  }

  TEST_CASE("field interpolation is exact on affine data") {
    const auto g = GridSpec::square(9, 1.0);
    const auto f = ComplexField::from_function(g, [](cplx z) { return 2.0 * z + cplx(0, 1) * std::conj(z); });
    const cplx p(0.137, -0.42);
    CHECK(std::abs(f.interpolate(p) - (2.0 * p + cplx(0, 1) * std::conj(p))) < 1e-14);
  }
}
