// Python bindings for the main operations: constraint analysis, radial
// integrals, the solver stack, and the lithium pipeline.
#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pinscf/pipeline.hpp"

namespace py = pybind11;
using namespace pinscf;

namespace {

SpinAssignment assignment_from_str(const std::string& s) { return parse_assignment(s); }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "pinned three-determinant MCSCF with occupation-number diagnostics";

    py::class_<OccupationVector>(m, "OccupationVector")
        .def(py::init<std::vector<double>>())
        .def_readonly("values", &OccupationVector::values)
        .def("sum", &OccupationVector::sum)
        .def("is_ordered", &OccupationVector::is_ordered, py::arg("tol") = 1e-10)
        .def("sorted_desc", &OccupationVector::sorted_desc)
        .def("__len__", &OccupationVector::dimension)
        .def("__getitem__", [](const OccupationVector& v, int i) {
            if (i < 0 || i >= v.dimension()) throw py::index_error();
            return v[i];
        });

    m.def("bd_equality_residuals", &bd_equality_residuals, py::arg("lam"));
    m.def("bd_inequality", &bd_inequality, py::arg("lam"));
    m.def("distance_to_hf", &distance_to_hf, py::arg("lam"), py::arg("N"));
    m.def("facet_distance", &facet_distance, py::arg("lam"));
    m.def(
        "analyze_occupations",
        [](const std::vector<double>& lam, int N) {
            return py::module_::import("json").attr("loads")(
                analyze_occupations(OccupationVector(lam), N).json());
        },
        py::arg("lam"), py::arg("N") = 3, "constraint report as a dict");

    py::class_<RadialFunction>(m, "RadialFunction")
        .def_readonly("label", &RadialFunction::label)
        .def("evaluate", &RadialFunction::evaluate, py::arg("r"));
    m.def("shull_lowdin", &shull_lowdin, py::arg("n"), py::arg("a"));
    m.def("hydrogenic_chi", &hydrogenic_chi, py::arg("n"), py::arg("b"));
    m.def("overlap", &overlap);
    m.def("kinetic", &kinetic);
    m.def("nuclear_attraction", &nuclear_attraction);
    m.def("coulomb_repulsion", &coulomb_repulsion);
    m.def("build_basis", &build_basis, py::arg("M"), py::arg("a"), py::arg("b"));

    py::class_<IntegralTables>(m, "IntegralTables")
        .def_readonly("K", &IntegralTables::K)
        .def_readonly("Z", &IntegralTables::Z)
        .def_property_readonly("h", [](const IntegralTables& t) { return t.h; })
        .def("g4", &IntegralTables::g4)
        .def("json", &IntegralTables::json);
    m.def("build_integral_tables", &build_integral_tables, py::arg("basis"), py::arg("Z"));

    py::class_<BDCoefficients>(m, "BDCoefficients")
        .def(py::init([](cplx a, cplx b, cplx g) {
                 return BDCoefficients{a, b, g};
             }),
             py::arg("alpha"), py::arg("beta"), py::arg("gamma"))
        .def_readonly("alpha", &BDCoefficients::alpha)
        .def_readonly("beta", &BDCoefficients::beta)
        .def_readonly("gamma", &BDCoefficients::gamma)
        .def("normalized", &BDCoefficients::normalized);
    m.def(
        "bd_non_closed_form",
        [](const BDCoefficients& c) { return bd_non_closed_form(c).values; }, py::arg("c"));
    m.def(
        "ansatz_energy",
        [](const BDCoefficients& c, const std::string& sa, const IntegralTables& t) {
            return ansatz_energy(c, assignment_from_str(sa), t);
        },
        py::arg("c"), py::arg("assignment"), py::arg("tables"));

    py::class_<SolverConfig>(m, "SolverConfig")
        .def(py::init<>())
        .def_readwrite("max_iterations", &SolverConfig::max_iterations)
        .def_readwrite("gradient_tolerance", &SolverConfig::gradient_tolerance)
        .def_readwrite("energy_tolerance", &SolverConfig::energy_tolerance)
        .def_readwrite("seed", &SolverConfig::seed)
        .def_readwrite("multistart", &SolverConfig::multistart);

    py::class_<ExponentResult>(m, "ExponentResult")
        .def_readonly("a", &ExponentResult::a)
        .def_readonly("b", &ExponentResult::b)
        .def_readonly("energy", &ExponentResult::energy)
        .def_readonly("evaluations", &ExponentResult::evaluations);
    m.def(
        "optimize_exponents",
        [](int M, double Z, const SolverConfig& cfg) { return optimize_exponents(M, Z, cfg); },
        py::arg("M"), py::arg("Z"), py::arg("config") = SolverConfig{});

    py::class_<HFResult>(m, "HFResult")
        .def_readonly("energy", &HFResult::energy)
        .def_readonly("iterations", &HFResult::iterations)
        .def_readonly("gradient_norm", &HFResult::gradient_norm);
    m.def("hf_preoptimize", &hf_preoptimize, py::arg("tables"), py::arg("config") = SolverConfig{});

    py::class_<SolveResult>(m, "SolveResult")
        .def_readonly("energy", &SolveResult::energy)
        .def_readonly("hf_energy", &SolveResult::hf_energy)
        .def_readonly("gradient_norm", &SolveResult::gradient_norm)
        .def_readonly("iterations", &SolveResult::iterations)
        .def_readonly("converged", &SolveResult::converged)
        .def_property_readonly("assignment",
                               [](const SolveResult& r) { return to_string(r.assignment); })
        .def_property_readonly("coefficients",
                               [](const SolveResult& r) { return r.coefficients; })
        .def_property_readonly("occupations",
                               [](const SolveResult& r) { return r.occupations.values; });
    m.def("mcscf_solve", &mcscf_solve, py::arg("tables"), py::arg("config") = SolverConfig{});

    m.def(
        "full_ci_energy",
        [](const IntegralTables& t, int N) { return full_ci_ground(t, N, 2 * t.K).energy; },
        py::arg("tables"), py::arg("N"), "sector-free full CI ground energy");

    m.def(
        "bound_report",
        [](const IntegralTables& t, const SolverConfig& cfg) {
            return py::module_::import("json").attr("loads")(bound_report(t, cfg).json());
        },
        py::arg("tables"), py::arg("config") = SolverConfig{}, "bound report as a dict");

    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init<>())
        .def_readwrite("M", &RunConfig::M)
        .def_readwrite("Z", &RunConfig::Z)
        .def_readwrite("a", &RunConfig::a)
        .def_readwrite("b", &RunConfig::b)
        .def_readwrite("optimize_exponents", &RunConfig::optimize_exponents)
        .def_readwrite("solver", &RunConfig::solver)
        .def_readwrite("cache_path", &RunConfig::cache_path);
    m.def(
        "run_lithium",
        [](const RunConfig& cfg) {
            return py::module_::import("json").attr("loads")(run_lithium(cfg).json());
        },
        py::arg("config"), "lithium pipeline report as a dict");
    m.def(
        "run_verify",
        [](const std::string& suite, unsigned seed) {
            VerifySummary s = run_verify(suite, seed);
            py::list checks;
            for (const auto& c : s.checks) {
                py::dict d;
                d["name"] = c.name;
                d["tolerance"] = c.tolerance;
                d["observed"] = c.observed;
                d["pass"] = c.pass;
                checks.append(d);
            }
            py::dict out;
            out["suite"] = s.suite;
            out["checks"] = checks;
            out["all_pass"] = s.all_pass();
            return out;
        },
        py::arg("suite"), py::arg("seed") = 12345u);
}
