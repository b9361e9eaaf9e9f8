#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sparsesr/io.hpp"
#include "sparsesr/networks.hpp"
#include "sparsesr/solver.hpp"
#include "sparsesr/verify.hpp"

namespace py = pybind11;
using namespace sparsesr;

namespace {

ProblemInstance make_instance(const RealMatrix& a, const RealMatrix& b, const RealMatrix& c,
                              std::optional<RealMatrix> s) {
  RealMatrix mask = s ? *s : RealMatrix::Ones(b.cols(), c.rows());
  return ProblemInstance(a, b, c, SparsityPattern(std::move(mask)));
}

py::dict report_dict(const OptimalityReport& rep) {
  py::dict d;
  for (const auto& [k, v] : rep.entries()) d[py::str(k)] = v;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Sparse real stability radius of A + B Delta C";
  m.attr("__version__") = SPARSESR_VERSION;

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", error.ptr());
  py::register_exception<StabilityAssumptionError>(m, "StabilityAssumptionError", error.ptr());
  py::register_exception<NotBoundaryPointError>(m, "NotBoundaryPointError", error.ptr());

  py::class_<ProblemInstance>(m, "ProblemInstance")
      .def(py::init(&make_instance), py::arg("A"), py::arg("B"), py::arg("C"),
           py::arg("S") = py::none())
      .def_property_readonly("A", &ProblemInstance::A)
      .def_property_readonly("B", &ProblemInstance::B)
      .def_property_readonly("C", &ProblemInstance::C)
      .def_property_readonly("S", [](const ProblemInstance& p) { return p.pattern().mask(); })
      .def_property_readonly("n", &ProblemInstance::n)
      .def_property_readonly("m", &ProblemInstance::m)
      .def_property_readonly("p", &ProblemInstance::p)
      .def("with_pattern",
           [](const ProblemInstance& p, const RealMatrix& s) {
             return p.with_pattern(SparsityPattern(s));
           })
      .def("perturbed", [](const ProblemInstance& p, const RealMatrix& d) {
        return perturbed_matrix(p, d);
      });

  py::enum_<DescentMode>(m, "DescentMode")
      .value("gradient", DescentMode::gradient)
      .value("newton", DescentMode::newton);
  py::enum_<StepRule>(m, "StepRule")
      .value("backtracking", StepRule::backtracking)
      .value("armijo", StepRule::armijo);
  py::enum_<Termination>(m, "Termination")
      .value("gradient_tolerance", Termination::gradient_tolerance)
      .value("decrement_tolerance", Termination::decrement_tolerance)
      .value("line_search_stalled", Termination::line_search_stalled)
      .value("max_iterations", Termination::max_iterations)
      .value("omega_collapsed", Termination::omega_collapsed);

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init<>())
      .def_readwrite("mode", &SolverConfig::mode)
      .def_readwrite("w", &SolverConfig::w)
      .def_readwrite("eps", &SolverConfig::eps)
      .def_readwrite("exact_hessian", &SolverConfig::exact_hessian)
      .def_readwrite("step_rule", &SolverConfig::step_rule)
      .def_readwrite("initial_step", &SolverConfig::initial_step)
      .def_readwrite("shrink", &SolverConfig::shrink)
      .def_readwrite("sufficient_decrease", &SolverConfig::sufficient_decrease)
      .def_readwrite("min_step", &SolverConfig::min_step)
      .def_readwrite("grad_tol", &SolverConfig::grad_tol)
      .def_readwrite("decrement_tol", &SolverConfig::decrement_tol)
      .def_readwrite("max_iters", &SolverConfig::max_iters)
      .def_readwrite("seed", &SolverConfig::seed)
      .def_readwrite("multistart_count", &SolverConfig::multistart_count)
      .def_readwrite("omega_zero_mode", &SolverConfig::omega_zero_mode)
      .def_readwrite("alpha_tol", &SolverConfig::alpha_tol)
      .def_readwrite("continuation_max_w", &SolverConfig::continuation_max_w)
      .def_readwrite("jobs", &SolverConfig::jobs);

  py::class_<SolveResult>(m, "SolveResult")
      .def_readonly("delta", &SolveResult::delta)
      .def_readonly("delta_sparse", &SolveResult::delta_sparse)
      .def_readonly("omega", &SolveResult::omega)
      .def_readonly("x", &SolveResult::x)
      .def_readonly("eigvec", &SolveResult::eigvec)
      .def_readonly("g", &SolveResult::g)
      .def_readonly("columns", &SolveResult::columns)
      .def_readonly("fnorm", &SolveResult::fnorm)
      .def_readonly("fnorm_sparse", &SolveResult::fnorm_sparse)
      .def_readonly("sparsity_error", &SolveResult::sparsity_error)
      .def_readonly("cost", &SolveResult::cost)
      .def_readonly("grad_norm", &SolveResult::grad_norm)
      .def_readonly("final_weight", &SolveResult::final_weight)
      .def_readonly("alpha", &SolveResult::alpha)
      .def_readonly("alpha_sparse", &SolveResult::alpha_sparse)
      .def_readonly("converged", &SolveResult::converged)
      .def_readonly("valid_local_min", &SolveResult::valid_local_min)
      .def_readonly("termination", &SolveResult::termination)
      .def_readonly("iterations", &SolveResult::iterations)
      .def_property_readonly("trace_cost", [](const SolveResult& r) {
        std::vector<double> c;
        for (const IterationRecord& rec : r.trace) c.push_back(rec.cost);
        return c;
      });

  py::class_<MultistartResult>(m, "MultistartResult")
      .def_readonly("distinct", &MultistartResult::distinct)
      .def_readonly("best", &MultistartResult::best)
      .def_readonly("radius", &MultistartResult::radius)
      .def_readonly("runs", &MultistartResult::runs)
      .def_property_readonly("certified", &MultistartResult::certified);

  py::class_<SweepRow>(m, "SweepRow")
      .def_readonly("w", &SweepRow::w)
      .def_readonly("result", &SweepRow::result)
      .def_readonly("error", &SweepRow::error);

  py::class_<OptimalityReport>(m, "OptimalityReport")
      .def_property_readonly("passed", &OptimalityReport::pass)
      .def("as_dict", &report_dict);

  py::class_<BruteForceResult>(m, "BruteForceResult")
      .def_readonly("lower", &BruteForceResult::lower)
      .def_readonly("upper", &BruteForceResult::upper)
      .def_readonly("estimate", &BruteForceResult::estimate)
      .def_readonly("bracket_width", &BruteForceResult::bracket_width)
      .def_readonly("argmin", &BruteForceResult::argmin);

  py::class_<PatternResult>(m, "PatternResult")
      .def_property_readonly("entries",
                             [](const PatternResult& r) {
                               std::vector<std::pair<Eigen::Index, Eigen::Index>> e;
                               for (const Entry& x : r.entries) e.emplace_back(x.row, x.col);
                               return e;
                             })
      .def_readonly("sr", &PatternResult::sr)
      .def_readonly("omega", &PatternResult::omega)
      .def_readonly("delta", &PatternResult::delta)
      .def_readonly("tie_group", &PatternResult::tie_group)
      .def_readonly("error", &PatternResult::error);

  m.def("load_problem", [](const std::string& path) { return load_problem(path); },
        py::arg("path"));
  m.def("parse_problem", &parse_problem, py::arg("text"), py::arg("source") = "<input>");

  m.def("solve", &solve, py::arg("instance"), py::arg("config"), py::arg("g0"), py::arg("omega0"),
        py::call_guard<py::gil_scoped_release>());
  m.def("solve_omega_zero", &solve_omega_zero, py::arg("instance"), py::arg("config"),
        py::arg("g0"), py::call_guard<py::gil_scoped_release>());
  m.def("multistart",
        py::overload_cast<const ProblemInstance&, const SolverConfig&>(&multistart),
        py::arg("instance"), py::arg("config") = SolverConfig{},
        py::call_guard<py::gil_scoped_release>());
  m.def("weight_sweep", &weight_sweep, py::arg("instance"), py::arg("config"),
        py::arg("weights"), py::call_guard<py::gil_scoped_release>());

  m.def(
      "certify",
      [](const ProblemInstance& inst, const RealMatrix& delta, double omega, bool sparsify) {
        return certify(inst, delta, omega, VerifyThresholds{}, sparsify);
      },
      py::arg("instance"), py::arg("delta"), py::arg("omega"), py::arg("sparsify") = true);
  m.def("spectral_abscissa", &spectral_abscissa, py::arg("M"));
  m.def(
      "sample_spectral_set",
      [](const ProblemInstance& inst, double eta, const std::string& strategy, int samples,
         std::uint64_t seed) {
        SamplingOptions o;
        o.strategy = parse_sampling_strategy(strategy);
        o.samples = samples;
        o.seed = seed;
        const SpectralCloud cloud = sample_spectral_set(inst, eta, o);
        return ComplexVector(Eigen::Map<const ComplexVector>(
            cloud.points.data(), static_cast<Eigen::Index>(cloud.points.size())));
      },
      py::arg("instance"), py::arg("eta"), py::arg("strategy") = "random",
      py::arg("samples") = 20000, py::arg("seed") = 0);
  m.def(
      "brute_force_sr",
      [](const ProblemInstance& inst) { return brute_force_sr(inst); }, py::arg("instance"));

  m.def(
      "build_network",
      [](const std::string& topology, Eigen::Index nodes, double self_weight, double edge_weight) {
        return build_network({parse_topology(topology), nodes, self_weight, edge_weight});
      },
      py::arg("topology"), py::arg("nodes") = 7, py::arg("self_weight") = -2.5,
      py::arg("edge_weight") = 1.0);
  m.def(
      "rank_critical_edges",
      [](const std::string& topology, Eigen::Index nodes, int budget, const std::string& cls,
         const SolverConfig& cfg) {
        py::gil_scoped_release release;
        NetworkSpec spec;
        spec.topology = parse_topology(topology);
        spec.nodes = nodes;
        return rank_critical_edges(spec, {budget, parse_edge_class(cls)}, cfg);
      },
      py::arg("topology"), py::arg("nodes") = 7, py::arg("budget") = 1,
      py::arg("entry_class") = "self", py::arg("config") = SolverConfig{});
}
