#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "beltrami/cli.hpp"
#include "beltrami/dilatation.hpp"
#include "beltrami/error.hpp"
#include "beltrami/radial.hpp"
#include "beltrami/solver.hpp"
#include "beltrami/transforms.hpp"
#include "beltrami/verify.hpp"

namespace py = pybind11;
using namespace beltrami;

namespace {

py::array_t<cplx> to_array(const ComplexField& f) {
  const auto& g = f.grid();
  py::array_t<cplx> out({g.ny, g.nx});
  std::copy(f.data().begin(), f.data().end(), out.mutable_data());
  return out;
}

ComplexField from_array(const GridSpec& g, py::array_t<cplx, py::array::c_style | py::array::forcecast> a) {
  if (a.ndim() != 2 || static_cast<std::size_t>(a.shape(0)) != g.ny || static_cast<std::size_t>(a.shape(1)) != g.nx) {
    throw DomainError("array shape must be (ny, nx) of the grid");
  }
  return ComplexField(g, std::vector<cplx>(a.data(), a.data() + a.size()));
}

MuSpec named_mu(const std::string& name, double alpha, cplx c, double k) {
  MuSpec mu;
  if (name == "example3") {
    mu = MuSpec::example3(alpha);
  } else if (name == "example4") {
    mu = MuSpec::example4();
  } else if (name == "const") {
    mu = MuSpec::constant_disk(c);
  } else if (name != "zero") {
    throw DomainError("unknown dilatation '" + name + "'");
  }
  return k > 0.0 ? truncate_mu(mu, k) : mu;
}

RadialProfile named_profile(const std::string& name, int n, double m) {
  if (name == "identity") {
    return RadialProfile::identity(n);
  }
  if (name == "example2") {
    return RadialProfile::example2(n, m);
  }
  if (name == "example4-limit") {
    return RadialProfile::example4_limit();
  }
  if (name == "numeric-example2") {
    return rho_profile(example2_weight(n, m));
  }
  if (name == "example1") {
    return rho_profile(example1_weight(n, m));
  }
  throw DomainError("unknown profile '" + name + "'");
}

RadialWeight named_weight(const std::string& name, int n, double m) {
  if (name == "identity") {
    return constant_weight(n);
  }
  if (name == "example2" || name == "numeric-example2") {
    return example2_weight(n, m);
  }
  if (name == "example4-limit") {
    return example2_weight(2, std::numeric_limits<double>::infinity());
  }
  if (name == "example1") {
    return example1_weight(n, m);
  }
  throw DomainError("unknown weight '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Degenerate Beltrami equations: solver and verification harness";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ContractionViolation>(m, "ContractionViolation", PyExc_ArithmeticError);
  py::register_exception<NonConvergence>(m, "NonConvergence", PyExc_ArithmeticError);

  py::class_<GridSpec>(m, "GridSpec")
      .def_static("square", &GridSpec::square, py::arg("n"), py::arg("half_width"))
      .def_readonly("nx", &GridSpec::nx)
      .def_readonly("ny", &GridSpec::ny)
      .def_readonly("x_min", &GridSpec::x_min)
      .def_readonly("y_min", &GridSpec::y_min)
      .def_readonly("dx", &GridSpec::dx)
      .def_readonly("dy", &GridSpec::dy)
      .def("__repr__", [](const GridSpec& g) {
        std::ostringstream s;
        s << "GridSpec(nx=" << g.nx << ", ny=" << g.ny << ", x_min=" << g.x_min << ", dx=" << g.dx << ")";
        return s.str();
      });

  m.def("mu_example3", &mu_example3, py::arg("z"), py::arg("alpha"));
  m.def("mu_example4", &mu_example4, py::arg("z"));
  m.def("K_mu", &K_mu, py::arg("mu"));
  m.def("K_Ip", &K_Ip, py::arg("f_z"), py::arg("f_zbar"), py::arg("p"));
  m.def("mu_of_inverse", &mu_of_inverse, py::arg("f_z"), py::arg("f_zbar"));
  m.def("example3_map", &example3_map, py::arg("z"), py::arg("alpha"), py::arg("k") = 0.0);
  m.def("example4_map", &example4_map, py::arg("z"), py::arg("k") = 0.0);
  m.def("example3_truncation_radius", &example3_truncation_radius, py::arg("alpha"), py::arg("k"));
  m.def("example4_truncation_radius", &example4_truncation_radius, py::arg("k"));

  m.def(
      "solve",
      [](const std::string& mu, double alpha, cplx c, double k, std::size_t grid, double half_width,
         double fix_tol, int max_iter) {
        SolveConfig cfg;
        cfg.grid = GridSpec::square(grid, half_width);
        cfg.fix_tol = fix_tol;
        cfg.max_iter = max_iter;
        const auto res = solve_principal(named_mu(mu, alpha, c, k), cfg);
        py::dict out;
        out["grid"] = res.f.grid();
        out["f"] = to_array(res.f);
        out["f_z"] = to_array(res.f_z);
        out["f_zbar"] = to_array(res.f_zbar);
        out["iterations"] = res.iterations;
        out["residual_linf"] = res.residual_linf_on_disk;
        out["dilatation_recovery"] = dilatation_recovery(res).sup_error;
        return out;
      },
      py::arg("mu") = "zero", py::arg("alpha") = 0.5, py::arg("c") = cplx{}, py::arg("k") = 0.0,
      py::arg("grid") = 512, py::arg("half_width") = 2.0, py::arg("fix_tol") = 1e-10, py::arg("max_iter") = 200,
      "Principal solution for a named dilatation; k > 0 truncates it.");

  m.def(
      "cauchy_transform",
      [](const GridSpec& g, py::array_t<cplx, py::array::c_style | py::array::forcecast> h) {
        return to_array(cauchy_transform(from_array(g, h)));
      },
      py::arg("grid"), py::arg("h"));
  m.def(
      "beurling_transform",
      [](const GridSpec& g, py::array_t<cplx, py::array::c_style | py::array::forcecast> h) {
        return to_array(beurling_transform(from_array(g, h)));
      },
      py::arg("grid"), py::arg("h"));

  m.def(
      "example4_KIp_integral",
      [](double k, double p) {
        const auto r = example4_KIp_integral(k, p);
        return py::make_tuple(r.w_route, r.z_route);
      },
      py::arg("k"), py::arg("p"));
  m.def("example4_KIp_bound", &example4_KIp_bound, py::arg("p"));

  m.def(
      "profile_value",
      [](const std::string& name, double r, int n, double m) { return named_profile(name, n, m).value(r); },
      py::arg("profile"), py::arg("r"), py::arg("n") = 2, py::arg("m") = 2.0);
  m.def(
      "inverse_poletsky_check",
      [](const std::string& name, double r1, double r2, int n, double m) {
        const auto rep = inverse_poletsky_check(named_profile(name, n, m), named_weight(name, n, m), r1, r2);
        py::dict out;
        out["lhs"] = rep.lhs;
        out["rhs"] = rep.rhs;
        out["holds"] = rep.holds;
        out["degenerate"] = rep.degenerate;
        return out;
      },
      py::arg("profile"), py::arg("r1"), py::arg("r2"), py::arg("n") = 2, py::arg("m") = 2.0);
  m.def("annulus_modulus", &annulus_modulus, py::arg("n"), py::arg("r1"), py::arg("r2"));

  m.def(
      "l1_norm",
      [](const std::string& name, double alpha) {
        L1Result r;
        if (name == "one") {
          r = l1_norm(constant_weight(2));
        } else if (name == "example1") {
          r = l1_norm(example1_weight(2));
        } else if (name == "example3-inverse") {
          r = l1_norm(example3_inverse_Q(alpha));
        } else if (name == "example4-inverse") {
          r = l1_norm(example4_inverse_Q());
        } else {
          throw DomainError("unknown majorant '" + name + "'");
        }
        return py::make_tuple(r.value, r.divergent);
      },
      py::arg("q"), py::arg("alpha") = 0.5);

  m.def(
      "holder_scan",
      [](const std::string& map, double alpha, int j_min, int j_max, int pairs, std::uint64_t seed) {
        HolderConfig cfg;
        cfg.scales = dyadic_scales(j_min, j_max);
        cfg.pairs_per_scale = pairs;
        cfg.seed = seed;
        PlanarMap f;
        if (map == "identity") {
          f = [](cplx z) { return z; };
        } else if (map == "example3") {
          f = [alpha](cplx z) { return example3_map(z, alpha); };
          cfg.branch_radii = {0.5};
        } else if (map == "example4") {
          f = [](cplx z) { return example4_map(z); };
          cfg.branch_radii = {std::exp(-0.5)};
        } else {
          throw DomainError("unknown map '" + map + "'");
        }
        const auto rep = holder_scan(f, cfg);
        py::dict out;
        out["scales"] = rep.scales;
        out["max_product"] = rep.per_scale_max_product;
        out["bounded"] = rep.bounded_flag;
        return out;
      },
      py::arg("map") = "example3", py::arg("alpha") = 0.5, py::arg("j_min") = 3, py::arg("j_max") = 14,
      py::arg("pairs_per_scale") = 2000, py::arg("seed") = 0);

  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "beltrami_lab");
        std::vector<const char*> argv;
        for (const auto& a : args) {
          argv.push_back(a.c_str());
        }
        std::ostringstream out;
        std::ostringstream err;
        const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the beltrami_lab command line; returns (exit code, stdout, stderr).");
}
