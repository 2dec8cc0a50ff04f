#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>

#include "parapuzzle/dynamics.hpp"
#include "parapuzzle/measurelab.hpp"
#include "parapuzzle/modulus.hpp"
#include "parapuzzle/paraplane.hpp"
#include "parapuzzle/potential.hpp"
#include "parapuzzle/realnest.hpp"

namespace py = pybind11;
using namespace parapuzzle;

namespace {

Plane plane_of(const std::string& name, Complex c) {
  if (name == "param" || name == "parameter") return Plane::parameter();
  if (name == "dynamical") return Plane::dynamical(c);
  fail(ErrorCode::InvalidArgument, "plane must be param or dynamical, got " + name);
}

RealNestConfig nest_config(int max_level, const std::string& model, const std::string& precision, double floor) {
  RealNestConfig cfg;
  cfg.max_level = max_level;
  cfg.resolution_floor = floor;
  if (model == "exact") cfg.model = OrbitModel::Exact;
  else if (model != "computed") fail(ErrorCode::InvalidArgument, "model must be computed or exact, got " + model);
  if (precision == "quad") cfg.precision = Precision::Quad;
  else if (precision == "auto") cfg.precision = Precision::Auto;
  else if (precision != "double") fail(ErrorCode::InvalidArgument, "precision must be double, quad or auto, got " + precision);
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_parapuzzle, m) {
  m.doc() = "Principal nests, external rays and parapuzzle moduli of z^2 + c";

  static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object inst = py::reinterpret_borrow<py::object>(error.ptr())(e.what());
      inst.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(error.ptr(), inst.ptr());
    }
  });

  m.def("uniform_at", &uniform_at, py::arg("seed"), py::arg("index"));
  m.def("iterate", &iterate, py::arg("c"), py::arg("z"), py::arg("n"));
  m.def("misiurewicz_d", &misiurewicz_d);
  m.def("solve_misiurewicz",
        [](int p, int q, int n, Complex seed) { return solve_misiurewicz(p, q, n, seed); },
        py::arg("p"), py::arg("q"), py::arg("n"), py::arg("seed"));
  m.def(
      "fixed_points",
      [](Complex c) {
        const FixedPointPair f = fixed_points(c);
        return py::make_tuple(f.alpha, f.beta);
      },
      py::arg("c"), "(alpha, beta)");

  py::class_<RayTrace>(m, "RayTrace")
      .def_readonly("points", &RayTrace::points)
      .def_readonly("potentials", &RayTrace::potentials)
      .def_readonly("landing_point", &RayTrace::landing_point)
      .def_readonly("landed", &RayTrace::landed)
      .def_readonly("diagnostic", &RayTrace::diagnostic);
  m.def(
      "trace_ray",
      [](const std::string& plane, std::uint64_t num, std::uint64_t den, Complex c, double g_start, double g_end) {
        return trace_ray(plane_of(plane, c), Angle(num, den), g_start, g_end);
      },
      py::arg("plane"), py::arg("num"), py::arg("den"), py::arg("c") = Complex(0.0), py::arg("g_start") = 1.3862943611198906,
      py::arg("g_end") = 1e-300);
  m.def(
      "trace_equipotential",
      [](const std::string& plane, double g, int samples, Complex c) { return trace_equipotential(plane_of(plane, c), g, samples); },
      py::arg("plane"), py::arg("g"), py::arg("samples"), py::arg("c") = Complex(0.0));

  py::class_<WindingResult>(m, "Winding")
      .def_readonly("w", &WindingResult::w)
      .def_readonly("increment", &WindingResult::increment)
      .def_readonly("min_separation", &WindingResult::min_separation);
  m.def("winding_number", &winding_number, py::arg("loop"), py::arg("phi"), py::arg("psi"));

  py::class_<RealNestLevel>(m, "RealNestLevel")
      .def_readonly("level", &RealNestLevel::level)
      .def_readonly("half_width", &RealNestLevel::half_width)
      .def_readonly("return_time", &RealNestLevel::return_time)
      .def_readonly("central", &RealNestLevel::central)
      .def_readonly("cascade_len", &RealNestLevel::cascade_len);
  py::class_<RealNest>(m, "RealNest")
      .def_readonly("c", &RealNest::c)
      .def_readonly("levels", &RealNest::levels)
      .def_property_readonly("stop", [](const RealNest& n) { return std::string(to_string(n.stop)); })
      .def_readonly("diagnostic", &RealNest::diagnostic);
  m.def(
      "real_nest",
      [](double c, int max_level, const std::string& model, const std::string& precision, double floor) {
        return compute_real_nest(c, nest_config(max_level, model, precision, floor));
      },
      py::arg("c"), py::arg("max_level") = 8, py::arg("model") = "computed", py::arg("precision") = "double",
      py::arg("floor") = 1e-6);

  py::class_<NestClassification>(m, "Classification")
      .def_property_readonly("verdict", [](const NestClassification& k) { return std::string(to_string(k.verdict)); })
      .def_readonly("cascade_levels", &NestClassification::cascade_levels)
      .def_readonly("return_times", &NestClassification::return_times)
      .def_readonly("cascade_lengths", &NestClassification::cascade_lengths)
      .def_readonly("censored", &NestClassification::censored)
      .def_readonly("outside_wake", &NestClassification::outside_wake)
      .def_property_readonly("non_renormalizable", &NestClassification::non_renormalizable);
  m.def(
      "classify", [](double c, int max_level) { return classify_parameter(c, nest_config(max_level, "computed", "double", 1e-6)); },
      py::arg("c"), py::arg("max_level") = 8);

  py::class_<ScalingReport>(m, "Scaling")
      .def_readonly("lambdas", &ScalingReport::lambdas)
      .def_readonly("rho", &ScalingReport::fit_rho)
      .def_readonly("r2", &ScalingReport::fit_r2)
      .def_readonly("sqrt_sum", &ScalingReport::sqrt_sum);
  m.def(
      "scaling_factors",
      [](double c, int levels, const std::string& model, const std::string& precision, double floor) {
        return scaling_factors(c, levels, nest_config(levels + 2, model, precision, floor));
      },
      py::arg("c"), py::arg("levels"), py::arg("model") = "exact", py::arg("precision") = "quad", py::arg("floor") = 1e-12);

  py::class_<ModulusEstimate>(m, "Modulus")
      .def_readonly("mod", &ModulusEstimate::mod)
      .def_readonly("richardson_error", &ModulusEstimate::richardson_error)
      .def_readonly("iterations", &ModulusEstimate::iterations);
  m.def(
      "annulus_modulus",
      [](const Polyline& outer, const Polyline& inner, int resolution) { return annulus_modulus({outer, inner, resolution}); },
      py::arg("outer"), py::arg("inner"), py::arg("resolution") = 512);

  m.def("renormalization_window", [](int period, double seed) { return renormalization_window(period, seed); },
        py::arg("period"), py::arg("seed"));
  m.def(
      "_density_experiment_json",
      [](double lo, double hi, std::size_t n, int max_level, std::uint64_t seed, int threads) {
        MeasureConfig cfg;
        cfg.threads = threads;
        MeasureReport r;
        {
          py::gil_scoped_release release;
          r = density_experiment(lo, hi, n, max_level, seed, cfg);
        }
        std::ostringstream out;
        write_measure_json(out, r);
        return out.str();
      },
      py::arg("lo"), py::arg("hi"), py::arg("n"), py::arg("max_level"), py::arg("seed"), py::arg("threads"));
}
