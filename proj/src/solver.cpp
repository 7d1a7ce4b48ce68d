#include "beltrami/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>

#include "beltrami/error.hpp"
#include "beltrami/transforms.hpp"

namespace beltrami {

namespace {

ComplexField sample_mu(const MuSpec& mu, const GridSpec& g, int ss) {
  ComplexField out(g);
  std::vector<double> offsets(static_cast<std::size_t>(ss));
  for (int a = 0; a < ss; ++a) {
    offsets[static_cast<std::size_t>(a)] = ((a + 0.5) / ss - 0.5);
  }
  const double reach = 1.0 + std::hypot(g.dx, g.dy);
  for (std::size_t j = 0; j < g.ny; ++j) {
    for (std::size_t i = 0; i < g.nx; ++i) {
      const cplx z = g.point(i, j);
      if (std::abs(z) > reach) {
        continue;
      }
      cplx acc = 0.0;
      for (double oy : offsets) {
        for (double ox : offsets) {
          acc += mu(z + cplx(ox * g.dx, oy * g.dy));
        }
      }
      out(i, j) = acc / static_cast<double>(ss * ss);
    }
  }
  return out;
}

bool near_jump(double r, const std::vector<double>& jumps, double band) {
  return std::any_of(jumps.begin(), jumps.end(), [&](double c) { return std::abs(r - c) <= band; });
}

}  // namespace

void SolveConfig::validate() const {
  grid.validate(8);
  if (std::abs(grid.dx - grid.dy) > 1e-12 * grid.dx) {
    throw InvalidGrid("solver grid needs square cells (dx == dy)");
  }
  if (!grid.covers_square(1.5)) {
    throw InvalidGrid("solver grid must contain [-1.5, 1.5]^2 so the disk is padded");
  }
  if (!(fix_tol > 0.0)) {
    throw DomainError("fix_tol must be positive");
  }
  if (max_iter < 1) {
    throw DomainError("max_iter must be positive");
  }
  if (supersample < 1 || supersample > 32) {
    throw DomainError("supersample must lie in [1, 32]");
  }
}

SolveResult solve_principal(const MuSpec& mu, const SolveConfig& cfg) {
  cfg.validate();
  const double sup = mu.sup_modulus();
  if (!(sup < 1.0)) {
    throw ContractionViolation("ess-sup |mu| must be < 1; truncate the dilatation first");
  }
  const GridSpec& g = cfg.grid;
  SolveResult res;
  res.mu_used = mu;
  res.mu_samples = sample_mu(mu, g, cfg.supersample);

  SpectralWorkspace ws(g, cfg.lattice_correction);
  const auto& m = res.mu_samples.data();
  const std::size_t size = g.size();
  std::vector<cplx> h(m.begin(), m.end());
  std::vector<cplx> sh(size);
  const double cell = g.dx * g.dy;

  double step = 0.0;
  bool converged = false;
  int iter = 0;
  while (iter < cfg.max_iter) {
    ws.beurling(h, sh);
    double diff = 0.0;
    for (std::size_t k = 0; k < size; ++k) {
      const cplx next = (m[k] == cplx{}) ? cplx{} : m[k] * (1.0 + sh[k]);
      diff += std::norm(next - h[k]);
      h[k] = next;
    }
    ++iter;
    step = std::sqrt(diff * cell);
    if (step < cfg.fix_tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw NonConvergence("Beltrami iteration did not reach fix_tol within max_iter=" + std::to_string(cfg.max_iter),
                         step, step);
  }
  res.iterations = iter;
  res.last_step = step;

  ws.beurling(h, sh);
  std::vector<cplx> ch(size);
  ws.cauchy(h, ch);

  res.h = ComplexField(g, h);
  res.f_z_spectral = ComplexField(g);
  res.f = ComplexField(g);
  for (std::size_t j = 0; j < g.ny; ++j) {
    for (std::size_t i = 0; i < g.nx; ++i) {
      const std::size_t k = g.index(i, j);
      res.f_z_spectral.data()[k] = 1.0 + sh[k];
      res.f.data()[k] = g.point(i, j) + ch[k];
    }
  }
  auto [fz, fzb] = wirtinger_derivatives(res.f);
  res.f_z = std::move(fz);
  res.f_zbar = std::move(fzb);

  const auto summary = residual_report(res);
  res.residual_linf_on_disk = summary.linf;
  res.residual_l2_on_disk = summary.l2;
  res.residual_worst_point = summary.worst_point;
  return res;
}

ResidualSummary residual_report(const SolveResult& res) {
  ResidualSummary out;
  const GridSpec& g = res.f.grid();
  const auto jumps = res.mu_used.jump_radii();
  const double band = 2.0 * g.dx;
  double sum = 0.0;
  for (std::size_t j = 0; j < g.ny; ++j) {
    for (std::size_t i = 0; i < g.nx; ++i) {
      const cplx z = g.point(i, j);
      const double r = std::abs(z);
      if (r > 0.95 || near_jump(r, jumps, band)) {
        continue;
      }
      const double e = std::abs(res.f_zbar(i, j) - res.mu_samples(i, j) * res.f_z(i, j));
      sum += e * e;
      if (e > out.linf) {
        out.linf = e;
        out.worst_point = z;
      }
    }
  }
  out.l2 = std::sqrt(sum * g.dx * g.dy);
  return out;
}

RecoverySummary dilatation_recovery(const SolveResult& res, double radius, double band_cells) {
  RecoverySummary out;
  const GridSpec& g = res.f.grid();
  const auto jumps = res.mu_used.jump_radii();
  const double band = band_cells * g.dx;
  for (std::size_t j = 0; j < g.ny; ++j) {
    for (std::size_t i = 0; i < g.nx; ++i) {
      const cplx z = g.point(i, j);
      const double r = std::abs(z);
      if (r > radius || near_jump(r, jumps, band)) {
        continue;
      }
      const cplx a = res.f_z(i, j);
      const cplx recovered = (a == cplx{}) ? cplx{} : res.f_zbar(i, j) / a;
      const double e = std::abs(recovered - res.mu_used(z));
      ++out.probes;
      if (e > out.sup_error) {
        out.sup_error = e;
        out.worst_point = z;
      }
    }
  }
  return out;
}

double KIp_integral_z_route(const SolveResult& res, double order_p) {
  if (!(order_p > 1.0 && order_p <= 2.0)) {
    throw DomainError("order p must lie in (1, 2]");
  }
  const GridSpec& g = res.f.grid();
  constexpr int ss = 4;
  double total = 0.0;
  for (std::size_t j = 0; j < g.ny; ++j) {
    for (std::size_t i = 0; i < g.nx; ++i) {
      const cplx z = g.point(i, j);
      if (std::abs(z) > 1.0 + g.dx) {
        continue;
      }
      int inside = 0;
      for (int a = 0; a < ss; ++a) {
        for (int b = 0; b < ss; ++b) {
          const cplx w = z + cplx(((a + 0.5) / ss - 0.5) * g.dx, ((b + 0.5) / ss - 0.5) * g.dy);
          inside += std::abs(w) <= 1.0 ? 1 : 0;
        }
      }
      if (inside == 0) {
        continue;
      }
      const double stretch = std::abs(res.f_z_spectral(i, j)) + std::abs(res.h(i, j));
      total += (static_cast<double>(inside) / (ss * ss)) * std::pow(stretch, order_p);
    }
  }
  return total * g.dx * g.dy;
}

unsigned configured_threads() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const char* env = std::getenv("BELTRAMI_LAB_THREADS");
  if (env == nullptr || *env == '\0') {
    return hw;
  }
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || v < 0) {
    throw DomainError(std::string("BELTRAMI_LAB_THREADS must be a nonnegative integer, got '") + env + "'");
  }
  return v == 0 ? hw : static_cast<unsigned>(v);
}

TruncationRun truncation_scheme(const MuSpec& mu, const std::vector<double>& k_schedule, double order_p,
                                const SolveConfig& cfg, std::optional<double> bound, unsigned threads) {
  if (k_schedule.empty()) {
    throw DomainError("k schedule must not be empty");
  }
  for (std::size_t i = 0; i < k_schedule.size(); ++i) {
    if (!(k_schedule[i] >= 1.0) || (i > 0 && !(k_schedule[i] > k_schedule[i - 1]))) {
      throw DomainError("k schedule must be strictly increasing and >= 1");
    }
  }
  if (!(order_p > 1.0 && order_p <= 2.0)) {
    throw DomainError("order p must lie in (1, 2]");
  }
  cfg.validate();

  TruncationRun run;
  run.k_schedule = k_schedule;
  run.bound = bound;
  const std::size_t count = k_schedule.size();
  std::vector<SolveResult> results(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        results[i] = solve_principal(truncate_mu(mu, k_schedule[i]), cfg);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(count, threads == 0 ? configured_threads() : threads));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) {
      pool.emplace_back(worker);
    }
    for (auto& t : pool) {
      t.join();
    }
  }
  for (const auto& e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
  run.per_k = std::move(results);

  const GridSpec& g = cfg.grid;
  for (std::size_t i = 0; i + 1 < count; ++i) {
    double d = 0.0;
    for (std::size_t j = 0; j < g.ny; ++j) {
      for (std::size_t q = 0; q < g.nx; ++q) {
        if (std::abs(g.point(q, j)) <= 0.9) {
          d = std::max(d, std::abs(run.per_k[i + 1].f(q, j) - run.per_k[i].f(q, j)));
        }
      }
    }
    run.pairwise_sup_dist.push_back(d);
  }
  for (const auto& r : run.per_k) {
    const double v = KIp_integral_z_route(r, order_p);
    run.KIp_integrals.push_back(v);
    run.KIp_finite.push_back(std::isfinite(v));
    if (!std::isfinite(v) || (bound && v > *bound)) {
      run.within_bound = false;
    }
  }
  return run;
}

double example4_KIp_bound(double order_p) {
  if (!(order_p > 1.0 && order_p < 2.0)) {
    throw DomainError("the Example 4 bound needs 1 < p < 2");
  }
  return kPi + 2.0 * kPi / (2.0 - order_p);
}

KIpRoutes example4_KIp_integral(double k, double order_p, const QuadratureConfig& cfg) {
  if (!(k >= 1.0)) {
    throw DomainError("truncation level k must be >= 1");
  }
  if (!(order_p > 1.0 && order_p <= 2.0)) {
    throw DomainError("order p must lie in (1, 2]");
  }
  const double p = order_p;
  KIpRoutes out;
  // Inverse map: conformal scaling inside |y| <= k^{-1/2}, radial stretch outside.
  const double s_k = 1.0 / std::sqrt(k);
  const double inner_scale = std::exp((1.0 - k) / (2.0 * k)) * std::sqrt(k);
  const auto w_outer = adaptive_integral_1d(
      [p](double s) { return std::exp(0.5 * (s * s - 1.0) * (2.0 - p)) * std::pow(s, 1.0 - p); }, s_k, 1.0, cfg);
  out.w_route = kPi * s_k * s_k * std::pow(inner_scale, 2.0 - p) + 2.0 * kPi * w_outer.value;

  // Forward map: |f_z| + |f_zbar| = max(rho/r, rho').
  const double R = example4_truncation_radius(k);
  const double c = 1.0 / inner_scale;
  const auto z_outer = adaptive_integral_1d(
      [p](double r) {
        const double rho = std::sqrt(2.0 * std::log(r) + 1.0);
        const double stretch = std::max(rho / r, 1.0 / (r * rho));
        return std::pow(stretch, p) * r;
      },
      R, 1.0, cfg);
  out.z_route = kPi * R * R * std::pow(c, p) + 2.0 * kPi * z_outer.value;
  return out;
}

KIpRoutes example3_KIp_integral(double alpha, double k, double order_p, const QuadratureConfig& cfg) {
  if (!(alpha > 0.0 && alpha < 2.0)) {
    throw DomainError("Example 3 needs 0 < alpha < 2");
  }
  if (!(k >= 1.0)) {
    throw DomainError("truncation level k must be >= 1");
  }
  if (!(order_p > 1.0 && order_p <= 2.0)) {
    throw DomainError("order p must lie in (1, 2]");
  }
  const double p = order_p;
  const double R = example3_truncation_radius(alpha, k);
  if (R >= 1.0) {
    return {kPi, kPi};
  }
  KIpRoutes out;
  const double s_k = std::pow(1.0 / (k * alpha - 1.0), 1.0 / alpha);
  const double a = R / s_k;
  const auto w_outer = adaptive_integral_1d(
      [alpha, p](double s) {
        const double tangential = (std::pow(s, alpha) + 1.0) / (2.0 * s);
        const double radial = 0.5 * alpha * std::pow(s, alpha - 1.0);
        const double lo = std::min(tangential, radial);
        return tangential * radial / std::pow(lo, p) * s;
      },
      s_k, 1.0, cfg);
  out.w_route = kPi * s_k * s_k * std::pow(a, 2.0 - p) + 2.0 * kPi * w_outer.value;

  const double c = 1.0 / a;
  const auto z_outer = adaptive_integral_1d(
      [alpha, p](double r) {
        const double rho = std::pow(2.0 * r - 1.0, 1.0 / alpha);
        const double drho = (2.0 / alpha) * std::pow(2.0 * r - 1.0, 1.0 / alpha - 1.0);
        return std::pow(std::max(rho / r, drho), p) * r;
      },
      R, 1.0, cfg);
  out.z_route = kPi * R * R * std::pow(c, p) + 2.0 * kPi * z_outer.value;
  return out;
}

}  // namespace beltrami
