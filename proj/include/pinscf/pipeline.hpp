// pipeline.hpp
// Orchestration behind the CLI subcommands: the lithium pipeline, occupation
// analysis, and the oracle verification suites.
#pragma once

#include "pinscf/bounds.hpp"
#include "pinscf/quadrature.hpp"

namespace pinscf {

enum class OutputFormat { Text, Json, Csv };

struct RunConfig {
    int M = 8;
    double Z = 3.0;
    double a = 2.6864;
    double b = 1.2751;
    bool optimize_exponents = false;  // keep (a, b) frozen by default
    std::optional<SpinAssignment> assignment;  // nullopt = auto (try both)
    SolverConfig solver;
    OutputFormat format = OutputFormat::Text;
    std::string cache_path;  // empty = no integral cache

    void validate() const;  // M >= 1, Z > 0, positive tolerances
};

// Literature anchors for the correlation bookkeeping (hartree).
CorrelationRefs lithium_refs();

struct LithiumReport {
    RunConfig config;
    double a_used = 0.0, b_used = 0.0;
    std::optional<ExponentResult> exponent_stage;
    double single_det_energy = 0.0;  // determinant |d1 up, d1 down, chi1 up>
    HFResult hf;
    SolveResult solve;
    BoundReport bound;
    bool converged = false;

    std::string json() const;
    std::string text_table() const;  // 6 significant digits
    std::string csv() const;
};

// build_basis -> tables -> optional exponent optimization -> HF -> MCSCF ->
// bound report.
LithiumReport run_lithium(const RunConfig& cfg);

// ConstraintReport for a comma-separated occupation vector; N defaults to 3.
ConstraintReport run_analyze(const std::vector<double>& lam, int N = 3);
std::vector<double> parse_occupations(const std::string& csv);  // throws on malformed input

struct CheckResult {
    std::string name;
    double tolerance = 0.0;
    double observed = 0.0;
    bool pass = false;
};

struct VerifySummary {
    std::string suite;
    std::vector<CheckResult> checks;
    bool all_pass() const;
};

// suite in {integrals, pinning, bounds, all}; throws on unknown suite.
VerifySummary run_verify(const std::string& suite, unsigned seed = 12345);

std::string format_report(const LithiumReport& report, OutputFormat format);

}  // namespace pinscf
