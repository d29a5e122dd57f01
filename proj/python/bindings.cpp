#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "macrolight/cascade.hpp"
#include "macrolight/errors.hpp"
#include "macrolight/events.hpp"
#include "macrolight/witnesses.hpp"

namespace py = pybind11;
using namespace macrolight;

namespace {

using Pair = std::pair<int, int>;

Outcome outcome(Pair w) { return {w.first, w.second}; }

OptimizeOptions options(int grid, bool refine) {
  OptimizeOptions o;
  o.grid.resolution = grid;
  o.refine = refine;
  return o;
}

}  // namespace

PYBIND11_MODULE(_macrolight, mod) {
  mod.doc() = "Fock-state cascade probabilities and macrorealism witnesses";
  mod.attr("__version__") = MACROLIGHT_VERSION;

  py::register_exception<CapacityError>(mod, "CapacityError");
  py::register_exception<EmptyPostSelection>(mod, "EmptyPostSelection");
  py::register_exception<NotEnoughPhotons>(mod, "NotEnoughPhotons");
  py::register_exception<ConfigError>(mod, "ConfigError", PyExc_ValueError);

  py::class_<Scheme>(mod, "Scheme")
      .def_static("sharp", &Scheme::sharp, py::arg("omega"))
      .def_static("blurred", &Scheme::blurred, py::arg("omega_min"), py::arg("omega_max"))
      .def_static("fair", &Scheme::fair, py::arg("omega_max"))
      .def_static("parse", &Scheme::parse, py::arg("text"))
      .def("render", &Scheme::render)
      .def("__str__", &Scheme::render)
      .def("__repr__", [](const Scheme& s) { return "Scheme.parse('" + s.render() + "')"; });

  py::class_<WitnessReport>(mod, "WitnessReport")
      .def_readonly("value", &WitnessReport::value)
      .def_readonly("angles", &WitnessReport::angles)
      .def_readonly("refined", &WitnessReport::refined)
      .def_readonly("evaluations", &WitnessReport::evaluations);

  mod.def(
      "prob_one_port",
      [](Pair w, int n, int m, double theta, double r) {
        return prob_one_port(outcome(w), {n, m}, {theta, r}).value();
      },
      py::arg("outcome"), py::arg("n"), py::arg("m"), py::arg("theta"), py::arg("r"));
  mod.def(
      "prob_two_port",
      [](std::array<Pair, 2> w, int n, int m, std::array<double, 2> theta, double r) {
        return prob_two_port({outcome(w[0]), outcome(w[1])}, {n, m}, {PortConfig{theta[0], r}, {theta[1], r}})
            .value();
      },
      py::arg("outcomes"), py::arg("n"), py::arg("m"), py::arg("thetas"), py::arg("r"));
  mod.def(
      "prob_three_port",
      [](std::array<Pair, 3> w, int n, int m, std::array<double, 3> theta, double r) {
        return prob_three_port({outcome(w[0]), outcome(w[1]), outcome(w[2])}, {n, m},
                               {PortConfig{theta[0], r}, {theta[1], r}, {theta[2], r}})
            .value();
      },
      py::arg("outcomes"), py::arg("n"), py::arg("m"), py::arg("thetas"), py::arg("r"));

  mod.def(
      "correlation",
      [](double tp, double tq, const Scheme& s, int n, int m, double r) { return correlation(tp, tq, s, {n, m}, r); },
      py::arg("theta_p"), py::arg("theta_q"), py::arg("scheme"), py::arg("n"), py::arg("m"), py::arg("r"));
  mod.def(
      "lgi_k",
      [](double t1, double t2, double t3, const Scheme& s, int n, int m, double r) {
        return lgi_k(t1, t2, t3, s, {n, m}, r);
      },
      py::arg("theta1"), py::arg("theta2"), py::arg("theta3"), py::arg("scheme"), py::arg("n"), py::arg("m"),
      py::arg("r"));

  const auto witness = [&](const char* name, auto fn) {
    mod.def(
        name,
        [fn](const Scheme& s, int n, int m, double r, int grid, bool refine) {
          py::gil_scoped_release release;
          return fn(s, FockInput{n, m}, r, options(grid, refine));
        },
        py::arg("scheme"), py::arg("n"), py::arg("m"), py::arg("r"), py::arg("grid") = 60,
        py::arg("refine") = true);
  };
  witness("kmax", [](const Scheme& s, FockInput in, double r, const OptimizeOptions& o) { return kmax(s, in, r, o); });
  witness("v12", [](const Scheme& s, FockInput in, double r, const OptimizeOptions& o) { return v12(s, in, r, o); });
  witness("v123", [](const Scheme& s, FockInput in, double r, const OptimizeOptions& o) { return v123(s, in, r, o); });

  mod.def(
      "find_critical_n",
      [](const Scheme& s, double r, int start, int limit, int grid) {
        CriticalSearch cs;
        {
          py::gil_scoped_release release;
          cs = find_critical_n(s, r, options(grid, true), start, limit);
        }
        return py::make_tuple(cs.n_c, cs.last_violating, cs.samples);
      },
      py::arg("scheme"), py::arg("r"), py::arg("start") = 6, py::arg("limit") = 16000, py::arg("grid") = 60,
      "Returns (n_c, last_violating, samples); n_c is None if no crossing below limit.");
}
