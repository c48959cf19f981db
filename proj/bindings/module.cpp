#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "eitshape/config.hpp"
#include "eitshape/io.hpp"
#include "eitshape/verify.hpp"

namespace py = pybind11;
using namespace eitshape;

namespace {

LevelSet levelset_from(int n, const std::vector<double>& phi) {
  StructuredMesh mesh = build_unit_square_mesh(n);
  if (static_cast<int>(phi.size()) != mesh.node_count())
    throw DimensionError("phi size does not match the node count of n");
  LevelSet out(phi.size());
  out.phi.v = phi;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Level-set EIT inclusion reconstruction driven by the distributed shape derivative";

  py::register_exception<Error>(m, "EitshapeError", PyExc_RuntimeError);

  py::class_<ShapeSpec>(m, "ShapeSpec")
      .def(py::init<>())
      .def("add_ball",
           [](ShapeSpec& s, double cx, double cy, double r) { s.balls.push_back({cx, cy, r}); },
           py::arg("cx"), py::arg("cy"), py::arg("r"))
      .def("add_ellipse",
           [](ShapeSpec& s, double cx, double cy, double a, double b, double angle) {
             s.ellipses.push_back({cx, cy, a, b, angle});
           },
           py::arg("cx"), py::arg("cy"), py::arg("a"), py::arg("b"), py::arg("angle") = 0.0)
      .def_property_readonly("empty", &ShapeSpec::empty);

  py::class_<EitProblem>(m, "EitProblem")
      .def(py::init<>())
      .def_readwrite("n", &EitProblem::n)
      .def_readwrite("sigma_plus", &EitProblem::sigma_plus)
      .def_readwrite("sigma_minus", &EitProblem::sigma_minus)
      .def_readwrite("alpha1", &EitProblem::alpha1)
      .def_readwrite("alpha2", &EitProblem::alpha2)
      .def_readwrite("delta", &EitProblem::delta)
      .def_readwrite("seed", &EitProblem::seed)
      .def_readwrite("gamma", &EitProblem::gamma)
      .def_readwrite("max_iterations", &EitProblem::max_iterations)
      .def_readwrite("c_armijo", &EitProblem::c_armijo)
      .def_readwrite("max_backtracks", &EitProblem::max_backtracks)
      .def_readwrite("stop_patience", &EitProblem::stop_patience)
      .def_readwrite("cfl", &EitProblem::cfl)
      .def_readwrite("cg_tol", &EitProblem::cg_tol)
      .def_property(
          "sigma_rule",
          [](const EitProblem& p) { return std::string(sigma_rule_name(p.sigma_rule)); },
          [](EitProblem& p, const std::string& name) { p.sigma_rule = sigma_rule_from_name(name); })
      .def("validate", &EitProblem::validate);

  py::class_<TraceRow>(m, "TraceRow")
      .def_readonly("iter", &TraceRow::iter)
      .def_readonly("J", &TraceRow::J)
      .def_readonly("step", &TraceRow::step)
      .def_readonly("dJ_theta", &TraceRow::dJ_theta)
      .def_readonly("grad_dev", &TraceRow::grad_dev)
      .def_readonly("stop_hits", &TraceRow::stop_hits);

  py::class_<OptTrace>(m, "OptTrace")
      .def_readonly("rows", &OptTrace::rows)
      .def_readonly("status", &OptTrace::status)
      .def_readonly("inverse_crime", &OptTrace::inverse_crime);

  py::class_<MeasurementSet>(m, "MeasurementSet")
      .def_readonly("mu", &MeasurementSet::mu)
      .def_readonly("source_n", &MeasurementSet::source_n)
      .def_readonly("delta", &MeasurementSet::delta)
      .def_property_readonly("flux_count",
                             [](const MeasurementSet& s) { return s.traces.size(); });

  m.def("synthesize_measurements", &synthesize_measurements, py::arg("problem"),
        py::arg("true_shapes"));

  m.def(
      "noise_level",
      [](const EitProblem& p, const MeasurementSet& ms) {
        StructuredMesh mesh = build_unit_square_mesh(p.n);
        return noise_level(mesh, ms);
      },
      py::arg("problem"), py::arg("measurements"));

  m.def(
      "reconstruct",
      [](const EitProblem& p, MeasurementSet& ms, const ShapeSpec& init) {
        ReconstructionResult r = reconstruct(p, ms, init);
        return py::make_tuple(r.phi.phi.v, r.trace);
      },
      py::arg("problem"), py::arg("measurements"), py::arg("initial_shapes"),
      "Returns (phi_values, trace)");

  m.def("signed_distance", &signed_distance, py::arg("shapes"), py::arg("x"), py::arg("y"));

  m.def(
      "level_set",
      [](int n, const ShapeSpec& shapes) {
        StructuredMesh mesh = build_unit_square_mesh(n);
        return init_signed_distance(mesh, shapes).phi.v;
      },
      py::arg("n"), py::arg("shapes"), "Nodal signed distance on the n-by-n structured mesh");

  m.def(
      "sublevel_area",
      [](int n, const std::vector<double>& phi) {
        StructuredMesh mesh = build_unit_square_mesh(n);
        return sublevel_area(mesh, levelset_from(n, phi));
      },
      py::arg("n"), py::arg("phi"));

  m.def(
      "symmetric_difference",
      [](int n, const std::vector<double>& a, const std::vector<double>& b) {
        StructuredMesh mesh = build_unit_square_mesh(n);
        return sublevel_symmetric_difference(mesh, levelset_from(n, a), levelset_from(n, b));
      },
      py::arg("n"), py::arg("a"), py::arg("b"));

  m.def(
      "advect",
      [](int n, const std::vector<double>& phi, const std::vector<double>& vx,
         const std::vector<double>& vy, double time, double cfl) {
        StructuredMesh mesh = build_unit_square_mesh(n);
        if (vx.size() != phi.size() || vy.size() != phi.size())
          throw DimensionError("velocity components must match phi");
        VectorField2 theta(phi.size());
        theta.x = vx;
        theta.y = vy;
        return advect(mesh, levelset_from(n, phi), theta, time, cfl).phi.v;
      },
      py::arg("n"), py::arg("phi"), py::arg("vx"), py::arg("vy"), py::arg("time"),
      py::arg("cfl") = 0.5);

  m.def(
      "verify_gaps",
      [](int panels, int radial, int angular) {
        ParametricCircle circle = make_circle(0.45, 0.5, 0.3, panels);
        GapReport divergence = volume_functional_check(
            circle, [](double, double) { return 1.0; }, [](double, double) { return 0.0; },
            [](double x, double y) { return std::array<double, 2>{x, y}; }, radial, angular);
        CorollaryReport corollary = corollary_simplification_check(
            circle, [](double x, double y) { return 1 + 0.5 * x * y; },
            [](double x, double y) {
              return std::array<double, 2>{x - 0.5, y - 0.5};
            });
        py::dict out;
        out["divergence"] = divergence.gap;
        out["corollary"] = corollary.gap;
        return out;
      },
      py::arg("panels") = 2048, py::arg("radial") = 128, py::arg("angular") = 512);
}
