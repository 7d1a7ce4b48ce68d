#include <doctest.h>

#include <cmath>

#include "beltrami/error.hpp"
#include "beltrami/solver.hpp"

using namespace beltrami;

namespace {

SolveConfig small(std::size_t n) {
  SolveConfig cfg;
  cfg.grid = GridSpec::square(n, 2.0);
  cfg.supersample = 4;
  return cfg;
}

}  // namespace

TEST_SUITE("solver") {
  TEST_CASE("zero dilatation gives the identity") {
    const auto res = solve_principal(MuSpec(), small(64));
    const auto& g = res.f.grid();
    double err = 0.0;
    for (std::size_t j = 0; j < g.ny; ++j) {
      for (std::size_t i = 0; i < g.nx; ++i) {
        err = std::max(err, std::abs(res.f(i, j) - g.point(i, j)));
      }
    }
    CHECK(err < 1e-14);
    CHECK(res.residual_linf_on_disk < 1e-13);
    CHECK(residual_report(res).linf < 1e-13);
  }

  TEST_CASE("constant dilatation on the disk") {
    const cplx c(0.3, 0.0);
    const auto res = solve_principal(MuSpec::constant_disk(c), small(256));
    const auto& g = res.f.grid();
    double err = 0.0;
    for (std::size_t j = 0; j < g.ny; ++j) {
      for (std::size_t i = 0; i < g.nx; ++i) {
        const cplx z = g.point(i, j);
        // glued closed form: z + c conj(z) inside, z + c / z outside
        const cplx exact = std::abs(z) <= 1.0 ? z + c * std::conj(z) : z + c / z;
        if (std::abs(z) <= 0.8 || std::abs(z) >= 1.2) {
          err = std::max(err, std::abs(res.f(i, j) - exact));
        }
      }
    }
    CHECK(err < 1e-2);
    CHECK(res.residual_linf_on_disk < 1e-2);
    const auto corner = res.f(0, 0) - g.point(0, 0);
    CHECK(std::abs(corner) < 0.2);
  }

  TEST_CASE("glued closed form solves the equation") {
    const cplx c(0.2, 0.25);
    auto f = [&](cplx z) { return std::abs(z) <= 1.0 ? z + c * std::conj(z) : z + c / z; };
    const double h = 1e-6;
    for (cplx z : {cplx(0.3, 0.1), cplx(-0.5, 0.6), cplx(1.5, -0.2), cplx(0.1, 2.0)}) {
      const cplx fx = (f(z + h) - f(z - h)) / (2 * h);
      const cplx fy = (f(z + cplx(0, h)) - f(z - cplx(0, h))) / (2 * h);
      const cplx fz = 0.5 * (fx - cplx(0, 1) * fy);
      const cplx fzb = 0.5 * (fx + cplx(0, 1) * fy);
      const cplx mu = std::abs(z) <= 1.0 ? c : cplx{};
      CHECK(std::abs(fzb - mu * fz) < 1e-8);
    }
    // continuity across the unit circle
    for (double t = 0.0; t < 6.2; t += 0.7) {
      const cplx e = std::polar(1.0, t);
      CHECK(std::abs((e + c * std::conj(e)) - (e + c / e)) < 1e-15);
    }
  }

  TEST_CASE("iteration counts follow the contraction rate") {
    for (double c : {0.1, 0.5, 0.9}) {
      auto cfg = small(64);
      cfg.max_iter = 400;
      const auto res = solve_principal(MuSpec::constant_disk(c), cfg);
      const int predicted = static_cast<int>(std::ceil(std::log(cfg.fix_tol) / std::log(c)));
      CAPTURE(c);
      CAPTURE(res.iterations);
      CHECK(res.iterations <= predicted + 5);
    }
  }

  TEST_CASE("solver errors") {
    CHECK_THROWS_AS(solve_principal(MuSpec::example4(), small(64)), ContractionViolation);
    auto cfg = small(64);
    cfg.max_iter = 2;
    CHECK_THROWS_AS(solve_principal(MuSpec::constant_disk(0.5), cfg), NonConvergence);
    SolveConfig narrow;
    narrow.grid = GridSpec::square(64, 1.2);
    CHECK_THROWS(narrow.validate());
  }

  TEST_CASE("refinement reduces the residual") {
    const auto mu = MuSpec::constant_disk(0.3);
    const auto coarse = solve_principal(mu, small(128));
    const auto fine = solve_principal(mu, small(256));
    CAPTURE(coarse.residual_linf_on_disk);
    CAPTURE(fine.residual_linf_on_disk);
    CHECK(coarse.residual_linf_on_disk >= 1.5 * fine.residual_linf_on_disk);
  }

  TEST_CASE("recovered dilatation is conformally invariant and sense-preserving") {
    const auto mu = truncate_mu(MuSpec::example3(0.5), 8.0);
    const auto res = solve_principal(mu, small(128));
    auto moved = res;
    const cplx a(0.6, -1.7);
    const cplx b(3.0, 0.25);
    for (std::size_t k = 0; k < moved.f.data().size(); ++k) {
      moved.f.data()[k] = a * res.f.data()[k] + b;
    }
    const auto [fz, fzb] = wirtinger_derivatives(moved.f);
    moved.f_z = fz;
    moved.f_zbar = fzb;
    const auto r0 = dilatation_recovery(res);
    const auto r1 = dilatation_recovery(moved);
    CHECK(std::abs(r0.sup_error - r1.sup_error) < 1e-10);
    const auto& g = res.f.grid();
    double jmin = 1e300;
    for (std::size_t j = 0; j < g.ny; ++j) {
      for (std::size_t i = 0; i < g.nx; ++i) {
        if (std::abs(g.point(i, j)) <= 0.9) {
          jmin = std::min(jmin, std::norm(res.f_z(i, j)) - std::norm(res.f_zbar(i, j)));
        }
      }
    }
    CHECK(jmin > 0.0);
  }

  TEST_CASE("K_{I,p} integral of a constant dilatation two ways") {
    const double c = 0.3;
    const double p = 1.5;
    const auto coarse = solve_principal(MuSpec::constant_disk(c), small(128));
    const auto res = solve_principal(MuSpec::constant_disk(c), small(256));
    // w-route: the image disk has area pi(1 - c^2) and K_{I,p} of the affine inverse is (1+c)^p / (1 - c^2)
    const double w_route = kPi * (1.0 - c * c) * std::pow(1.0 + c, p) / (1.0 - c * c);
    const double e_coarse = std::abs(KIp_integral_z_route(coarse, p) - w_route);
    const double e_fine = std::abs(KIp_integral_z_route(res, p) - w_route);
    CHECK(e_fine < e_coarse);
    CHECK(e_fine < 5e-3 * w_route);
  }

  TEST_CASE("closed-form K_{I,p} routes for the degenerate examples") {
    for (double k : {4.0, 16.0, 64.0}) {
      const auto r = example4_KIp_integral(k, 1.5);
      CHECK(r.w_route == doctest::Approx(r.z_route).epsilon(1e-6));
      CHECK(r.w_route <= 0.99 * example4_KIp_bound(1.5));
    }
    for (double k : {4.0, 16.0}) {
      const auto r = example3_KIp_integral(0.5, k, 1.5);
      CHECK(r.w_route == doctest::Approx(r.z_route).epsilon(1e-6));
    }
    CHECK(example4_KIp_bound(1.5) == doctest::Approx(5.0 * kPi));
    CHECK_THROWS(example4_KIp_bound(2.0));
  }

  TEST_CASE("truncation scheme with a bounded dilatation") {
    const auto run = truncation_scheme(MuSpec::constant_disk(0.3), {2.0, 4.0, 8.0}, 1.5, small(64), 10.0, 2);
    REQUIRE(run.per_k.size() == 3);
    for (double d : run.pairwise_sup_dist) {
      CHECK(d <= 2.0 * run.per_k.front().residual_linf_on_disk + 1e-12);
    }
    for (bool f : run.KIp_finite) {
      CHECK(f);
    }
    CHECK(run.within_bound);
  }

  TEST_CASE("truncation scheme on Example 3 settles") {
    const auto run = truncation_scheme(MuSpec::example3(0.5), {4.0, 8.0, 16.0, 32.0}, 1.5, small(128));
    REQUIRE(run.pairwise_sup_dist.size() == 3);
    CHECK(run.pairwise_sup_dist[2] < run.pairwise_sup_dist[0]);
    CHECK(dilatation_recovery(run.per_k[1]).sup_error < 5e-2);
  }
}
