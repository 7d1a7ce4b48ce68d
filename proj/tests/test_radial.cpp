#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "beltrami/error.hpp"
#include "beltrami/radial.hpp"

using namespace beltrami;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Example 2 stretch written out by hand: linear on [0, 1/m], power-exponential outside.
double example2_rho(int n, double m, double r) {
  const double c = (n - 1.0) / n;
  auto outer = [&](double s) { return std::exp(c * (std::pow(s, 1.0 / c) - 1.0)); };
  if (r >= 1.0 / m) {
    return outer(r);
  }
  return outer(1.0 / m) * r * m;
}

std::vector<double> random_point_in_ball(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> x(static_cast<std::size_t>(n));
  for (;;) {
    double r2 = 0.0;
    for (auto& v : x) {
      v = u(rng);
      r2 += v * v;
    }
    if (r2 <= 1.0 && r2 > 1e-6) {
      return x;
    }
  }
}

}  // namespace

TEST_SUITE("radial") {
  TEST_CASE("spherical means") {
    const double y0[] = {0.0, 0.0};
    const auto one = Density::radial(2, [](double) { return 1.0; });
    CHECK(spherical_mean(one, y0, 0.37) == doctest::Approx(1.0));
    const auto q1 = example1_density(2);
    CHECK(spherical_mean(q1, y0, 0.4) == doctest::Approx(1.0));
    CHECK(spherical_mean(q1, y0, 0.6) == doctest::Approx(1.0 / 0.36).epsilon(1e-12));
    const auto xsq = Density::planar([](cplx z) { return z.real() * z.real(); });
    CHECK(spherical_mean(xsq, y0, 0.8) == doctest::Approx(0.32).epsilon(1e-9));
    const auto off = Density::planar([](cplx z) { return std::abs(z) < 0.5 ? kInf : 1.0; });
    CHECK(spherical_mean(off, y0, 0.45) == kInf);
  }

  TEST_CASE("lehto integral examples") {
    CHECK(lehto_integral(constant_weight(3), 0.2, 0.9) == doctest::Approx(std::log(4.5)).epsilon(1e-10));
    CHECK(lehto_integral(power_weight(2, 2.0), 0.5, 1.0) == doctest::Approx(0.375).epsilon(1e-10));
    RadialWeight inf_weight{2, [](double) { return kInf; }, nullptr, "inf"};
    CHECK(lehto_integral(inf_weight, 0.1, 0.5) == 0.0);
  }

  TEST_CASE("Example 1 Lehto integral outgrows its harmonic lower bound") {
    const auto w = example1_weight(2);
    double prev = 0.0;
    for (int K : {5, 50, 500}) {
      double bound = 0.0;
      for (int k = 1; k <= K; ++k) {
        bound += std::log((2.0 * k + 1.0) / (2.0 * k));
      }
      const double value = lehto_integral(w, 1.0 / (2.0 * K + 1.0), 1.0);
      CHECK(value >= bound);
      CHECK(value > prev);
      prev = value;
    }
    CHECK(prev > 1.5);
  }

  TEST_CASE("numeric profile of the constant weight is the identity") {
    const auto p = rho_profile(constant_weight(2));
    for (double r : {1e-3, 0.1, 0.5, 0.99, 1.0}) {
      CHECK(p.value(r) == doctest::Approx(r).epsilon(1e-10));
    }
  }

  TEST_CASE("numeric profile of t^-n matches the closed form") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.01, 1.0);
    for (int n : {2, 3, 5}) {
      const auto p = rho_profile(example2_weight(n, kInf));
      CHECK(p.value(1.0) == 1.0);
      double prev = 0.0;
      for (int i = 0; i < 50; ++i) {
        const double r = u(rng);
        CHECK(std::abs(p.value(r) - example2_rho(n, kInf, r)) < 1e-8);
      }
      for (double r = 0.02; r <= 1.0; r += 0.02) {
        const double v = p.value(r);
        CHECK(v > prev);
        prev = v;
      }
    }
  }

  TEST_CASE("radial map evaluation") {
    const auto p = RadialProfile::example2(2, 2.0);
    const cplx at_branch = radial_map_eval(p, cplx(0.5, 0.0));
    CHECK(at_branch.real() == doctest::Approx(std::exp(-0.375)).epsilon(1e-14));
    CHECK(at_branch.imag() == 0.0);
    CHECK(radial_map_eval(p, cplx{}) == cplx{});
    const cplx edge = std::polar(1.0, 0.3);
    CHECK(std::abs(radial_map_eval(p, edge) - edge) < 1e-15);
    CHECK_THROWS_AS(radial_map_eval(p, cplx(1.1, 0.0)), DomainError);
  }

  TEST_CASE("Example 2 closed form agrees with the hand-written stretch") {
    for (int n : {2, 3, 4}) {
      for (double m : {1.0, 2.0, 5.0}) {
        const auto p = RadialProfile::example2(n, m);
        for (double r : {0.05, 0.19, 0.2, 0.21, 0.5, 0.77, 1.0}) {
          CHECK(p.value(r) == doctest::Approx(example2_rho(n, m, r)).epsilon(1e-13));
        }
      }
    }
  }

  TEST_CASE("round trips of registry profiles") {
    std::mt19937_64 rng(11);
    for (int n : {2, 3}) {
      for (double m : {1.0, 2.0, 5.0}) {
        const auto p = RadialProfile::example2(n, m);
        double err = 0.0;
        for (int i = 0; i < 100; ++i) {
          const auto x = random_point_in_ball(rng, n);
          const auto back = radial_map_invert(p, radial_map_eval(p, x));
          for (std::size_t d = 0; d < x.size(); ++d) {
            err = std::max(err, std::abs(back[d] - x[d]));
          }
        }
        CHECK(err < 1e-10);
      }
    }
    const auto numeric = rho_profile(example1_weight(2, 8.0));
    double err = 0.0;
    for (int i = 0; i < 100; ++i) {
      const auto x = random_point_in_ball(rng, 2);
      const auto back = radial_map_invert(numeric, radial_map_eval(numeric, x));
      err = std::max({err, std::abs(back[0] - x[0]), std::abs(back[1] - x[1])});
    }
    CHECK(err < 1e-10);
  }

  TEST_CASE("inverse of the Example 2 limit") {
    const auto p = RadialProfile::example2(2, kInf);
    CHECK(p.inverse(1.0) == doctest::Approx(1.0));
    CHECK(p.lower_limit() == doctest::Approx(std::exp(-0.5)));
    const auto p3 = RadialProfile::example2(3, kInf);
    for (double y : {0.6, 0.75, 0.9}) {
      const double expected = std::pow(3.0 * std::log(y) + 2.0, 2.0 / 3.0) / std::pow(2.0, 2.0 / 3.0);
      CHECK(p3.inverse(y) == doctest::Approx(expected).epsilon(1e-12));
    }
    CHECK_THROWS_AS(p.inverse(0.5), DomainError);
  }

  TEST_CASE("stretch factors") {
    const auto id = radial_stretch_factors(RadialProfile::identity(2), 0.4);
    CHECK(id.tangential == doctest::Approx(1.0));
    CHECK(id.radial == doctest::Approx(1.0));
    const auto sq = radial_stretch_factors(RadialProfile::power(2, 2.0), 0.5);
    CHECK(sq.tangential == doctest::Approx(0.5));
    CHECK(sq.radial == doctest::Approx(1.0));
    const auto g = RadialProfile::example4_limit();
    for (double s : {0.2, 0.5, 0.9}) {
      const auto f = radial_stretch_factors(g, s);
      const double e = std::exp((s * s - 1.0) / 2.0);
      CHECK(f.tangential == doctest::Approx(e / s).epsilon(1e-12));
      CHECK(f.radial == doctest::Approx(s * e).epsilon(1e-12));
    }
    CHECK(radial_stretch_factors(RadialProfile::example2(2, 2.0), 0.5).kink);
  }

  TEST_CASE("inner dilatation of radial maps") {
    CHECK(radial_K_Ip(RadialProfile::identity(3), 0.3, 1.5) == doctest::Approx(1.0));
    const auto g = RadialProfile::example4_limit();
    for (double s : {0.3, 0.6, 0.95}) {
      const double expected = std::exp((s * s - 1.0) / 2.0 * 0.5) * std::pow(s, -1.5);
      CHECK(radial_K_Ip(g, s, 1.5) == doctest::Approx(expected).epsilon(1e-12));
    }
    // p = 2 against finite-difference Wirtinger derivatives of the planar map.
    const auto p = RadialProfile::example2(2, 3.0);
    const cplx z0 = std::polar(0.7, 0.9);
    const double h = 1e-5;
    auto F = [&](cplx z) { return radial_map_eval(p, z); };
    const cplx fx = (F(z0 + h) - F(z0 - h)) / (2.0 * h);
    const cplx fy = (F(z0 + cplx(0, h)) - F(z0 - cplx(0, h))) / (2.0 * h);
    const cplx fz = 0.5 * (fx - cplx(0, 1) * fy);
    const cplx fzb = 0.5 * (fx + cplx(0, 1) * fy);
    const double k = std::abs(fzb / fz);
    CHECK(radial_K_Ip(p, 0.7, 2.0) == doctest::Approx((1 + k) / (1 - k)).epsilon(1e-6));
  }

  TEST_CASE("annulus modulus") {
    CHECK(annulus_modulus(2, 0.3, 0.3 * std::exp(1.0)) == doctest::Approx(2.0 * kPi));
    CHECK(annulus_modulus(3, 0.3, 0.3 * std::exp(1.0)) == doctest::Approx(4.0 * kPi));
    CHECK(annulus_modulus(2, 0.5, 1.0) == doctest::Approx(2.0 * kPi / std::log(2.0)));
    CHECK_THROWS_AS(annulus_modulus(2, 0.5, 0.5), DomainError);
  }

  TEST_CASE("inverse Poletsky inequality") {
    const auto eq = inverse_poletsky_check(RadialProfile::identity(2), constant_weight(2), 0.3, 0.8);
    CHECK(eq.holds);
    CHECK(std::abs(eq.lhs - eq.rhs) <= 1e-12 * eq.rhs);

    const auto worked =
        inverse_poletsky_check(RadialProfile::example2(2, kInf), example2_weight(2, kInf), 0.9, 1.0);
    const double lhs = 2.0 * kPi / std::log(std::sqrt(1.0 / (1.0 + 2.0 * std::log(0.9))));
    const double rhs = 4.0 * kPi / (1.0 - 0.81);
    CHECK(worked.lhs == doctest::Approx(lhs).epsilon(1e-10));
    CHECK(worked.rhs == doctest::Approx(rhs).epsilon(1e-10));
    CHECK(worked.holds);

    const auto straddle =
        inverse_poletsky_check(rho_profile(example1_weight(2, 10.0)), example1_weight(2, 10.0), 0.6, 0.95);
    CHECK(straddle.holds);

    RadialWeight inf_weight{2, [](double) { return kInf; }, nullptr, "inf"};
    const auto deg = inverse_poletsky_check(RadialProfile::identity(2), inf_weight, 0.2, 0.4);
    CHECK(deg.degenerate);
    CHECK(deg.holds);
    CHECK(deg.rhs == kInf);
  }

  TEST_CASE("profile tables") {
    const auto t = RadialProfile::from_table(2, {0.0, 0.25, 0.5, 1.0}, {0.0, 0.1, 0.4, 1.0});
    double prev = -1.0;
    for (double r = 0.0; r <= 1.0; r += 0.01) {
      CHECK(t.value(r) > prev);
      prev = t.value(r);
    }
    CHECK(t.value(0.5) == doctest::Approx(0.4));
    CHECK(t.inverse(t.value(0.33)) == doctest::Approx(0.33).epsilon(1e-12));
    CHECK_THROWS_AS(RadialProfile::from_table(2, {0.0, 0.5, 1.0}, {0.0, 0.6, 0.5}), InvariantViolation);
  }
}
