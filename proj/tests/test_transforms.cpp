#include <doctest.h>

#include <cmath>
#include <random>

#include "beltrami/error.hpp"
#include "beltrami/transforms.hpp"

using namespace beltrami;

namespace {

ComplexField disk_indicator(const GridSpec& g, int sub = 16) {
  return ComplexField::from_function(g, [&](cplx z) {
    int inside = 0;
    for (int a = 0; a < sub; ++a) {
      for (int b = 0; b < sub; ++b) {
        const cplx p = z + cplx(g.dx * ((a + 0.5) / sub - 0.5), g.dy * ((b + 0.5) / sub - 0.5));
        inside += std::norm(p) <= 1.0 ? 1 : 0;
      }
    }
    return cplx(static_cast<double>(inside) / (sub * sub), 0.0);
  });
}

// (1/pi) int_D dA / (z - zeta) in polar coordinates about z, by the periodic trapezoid rule.
cplx cauchy_of_disk(cplx z) {
  const int n = 4096;
  cplx sum{};
  for (int k = 0; k < n; ++k) {
    const double phi = 2.0 * kPi * k / n;
    const cplx e = std::polar(1.0, phi);
    const double b = (std::conj(z) * e).real();
    const double R = -b + std::sqrt(b * b + 1.0 - std::norm(z));
    sum += -std::conj(e) * R;
  }
  return sum * (2.0 * kPi / n) / kPi;
}

ComplexField random_disk_field(const GridSpec& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  return ComplexField::from_function(g, [&](cplx z) {
    const cplx v(nd(rng), nd(rng));
    return std::abs(z) <= 1.0 ? v : cplx{};
  });
}

double l2(const std::vector<cplx>& v) {
  double s = 0.0;
  for (const auto& x : v) {
    s += std::norm(x);
  }
  return std::sqrt(s);
}

}  // namespace

TEST_SUITE("transforms") {
  TEST_CASE("zero in, zero out") {
    const ComplexField zero(GridSpec::square(64, 2.0));
    const auto c = cauchy_transform(zero);
    for (const auto& v : c.data()) {
      CHECK(v == cplx{});
    }
    const auto s = beurling_transform(zero);
    for (const auto& v : s.data()) {
      CHECK(v == cplx{});
    }
  }

  TEST_CASE("linearity") {
    const auto g = GridSpec::square(64, 2.0);
    const auto a = random_disk_field(g, 1);
    const auto b = random_disk_field(g, 2);
    const cplx s(0.7, -0.2);
    const cplx t(-1.5, 0.4);
    const auto lhs = cauchy_transform(s * a + t * b);
    const auto ca = cauchy_transform(a);
    const auto cb = cauchy_transform(b);
    double err = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      err = std::max(err, std::abs(lhs.data()[i] - s * ca.data()[i] - t * cb.data()[i]));
      scale = std::max(scale, std::abs(lhs.data()[i]));
    }
    CHECK(err <= 1e-12 * scale);
  }

  TEST_CASE("Cauchy transform of the disk indicator against kernel quadrature") {
    const auto g = GridSpec::square(256, 2.0);
    const auto c = cauchy_transform(disk_indicator(g));
    for (cplx z : {cplx(0.5, 0.0), cplx(0.0, 0.3), cplx(-0.2, 0.6), cplx(-0.55, -0.45), cplx(0.1, -0.05)}) {
      const cplx oracle = cauchy_of_disk(z);
      CHECK(std::abs(oracle - std::conj(z)) < 1e-10);
      CHECK(std::abs(c.interpolate(z) - oracle) < 1e-3);
    }
  }

  TEST_CASE("Beurling transform carries dbar to d on a Gaussian") {
    const auto g = GridSpec::square(256, 2.0);
    const auto gzb = ComplexField::from_function(g, [](cplx z) {
      const double r2 = std::norm(z);
      return cplx(std::exp(-4.0 * r2) * (1.0 - 4.0 * r2));
    });
    const auto s = beurling_transform(gzb);
    double err = 0.0;
    for (std::size_t j = 0; j < g.ny; ++j) {
      for (std::size_t i = 0; i < g.nx; ++i) {
        const cplx z = g.point(i, j);
        if (std::abs(z) <= 1.0) {
          const cplx zb = std::conj(z);
          err = std::max(err, std::abs(s(i, j) + 4.0 * zb * zb * std::exp(-4.0 * std::norm(z))));
        }
      }
    }
    CHECK(err < 1e-3);
  }

  TEST_CASE("Beurling transform is complex symmetric and contractive on the disk") {
    const auto g = GridSpec::square(128, 2.0);
    SpectralWorkspace ws(g);
    const auto x = random_disk_field(g, 3);
    const auto y = random_disk_field(g, 4);
    std::vector<cplx> sx(g.size());
    std::vector<cplx> sy(g.size());
    ws.beurling(x.samples(), sx);
    ws.beurling(y.samples(), sy);
    cplx a{};
    cplx b{};
    for (std::size_t i = 0; i < g.size(); ++i) {
      a += sx[i] * y.data()[i];
      b += x.data()[i] * sy[i];
    }
    CHECK(std::abs(a - b) <= 1e-10 * std::abs(a));

    auto project = [&](std::vector<cplx>& v) {
      for (std::size_t j = 0; j < g.ny; ++j) {
        for (std::size_t i = 0; i < g.nx; ++i) {
          if (std::abs(g.point(i, j)) > 1.0) {
            v[g.index(i, j)] = 0.0;
          }
        }
      }
    };
    std::vector<cplx> v = random_disk_field(g, 5).data();
    std::vector<cplx> w(g.size());
    double norm = 0.0;
    for (int it = 0; it < 60; ++it) {
      const double n0 = l2(v);
      for (auto& e : v) {
        e /= n0;
      }
      ws.beurling(v, w);
      project(w);
      norm = l2(w);
      // adjoint of a complex-symmetric operator: conj o A o conj
      for (auto& e : w) {
        e = std::conj(e);
      }
      ws.beurling(w, v);
      for (auto& e : v) {
        e = std::conj(e);
      }
      project(v);
    }
    CHECK(norm <= 1.0 + 1e-6);
    CHECK(norm > 0.9);
  }

  TEST_CASE("support checks") {
    const auto g = GridSpec::square(32, 2.0);
    const ComplexField ones = ComplexField::from_function(g, [](cplx) { return cplx(1.0); });
    CHECK_THROWS_AS(cauchy_transform(ones), PaddingError);
    CHECK_NOTHROW(check_support(disk_indicator(g, 2)));
    GridSpec rect{32, 16, -2.0, -1.0, 4.0 / 31, 2.0 / 15};
    CHECK_THROWS(beurling_transform(ComplexField(rect)));
  }

  TEST_CASE("lattice sums of the square lattice") {
    const int R = 300;
    double g4 = 0.0;
    double g8 = 0.0;
    for (int m = -R; m <= R; ++m) {
      for (int n = -R; n <= R; ++n) {
        if (m == 0 && n == 0) {
          continue;
        }
        const cplx w(m, n);
        const cplx w2 = w * w;
        g4 += (1.0 / (w2 * w2)).real();
        g8 += (1.0 / (w2 * w2 * w2 * w2)).real();
      }
    }
    CHECK(lattice_sum(4) == doctest::Approx(g4).epsilon(1e-4));
    CHECK(lattice_sum(8) == doctest::Approx(g8).epsilon(1e-10));
  }
}
