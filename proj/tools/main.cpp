// pinscf command-line driver: lithium pipeline, occupation analysis, and
// oracle verification suites.
#include <cstdio>
#include <exception>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "pinscf/pipeline.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNotConverged = 3;

std::string fmt6(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
}

std::string analyze_text(const pinscf::ConstraintReport& rep, const std::vector<double>& lam) {
    std::ostringstream os;
    os << "occupation analysis (d=" << lam.size() << ", N=3)\n";
    os << "  pauli violations: ";
    if (rep.pauli_violations.empty())
        os << "none\n";
    else {
        for (const auto& v : rep.pauli_violations)
            os << "entry " << v.index << " excess " << fmt6(v.excess) << "  ";
        os << "\n";
    }
    if (rep.bd_equality_residuals) {
        const auto& r = *rep.bd_equality_residuals;
        os << "  equality residuals: " << fmt6(r[0]) << " " << fmt6(r[1]) << " " << fmt6(r[2])
           << "\n";
    }
    if (rep.bd_inequality_value) os << "  D = " << fmt6(*rep.bd_inequality_value) << "\n";
    os << "  S (l1 distance to HF point) = " << fmt6(rep.hf_distance) << "\n";
    if (rep.facet_distance) os << "  facet distance = " << fmt6(*rep.facet_distance) << "\n";
    os << "  representable in (3,6): " << (rep.representable ? "yes" : "no") << "\n";
    if (!rep.message.empty()) os << "  " << rep.message << "\n";
    return os.str();
}

int run_lithium_cmd(const pinscf::RunConfig& cfg) {
    pinscf::LithiumReport rep = pinscf::run_lithium(cfg);
    std::cout << pinscf::format_report(rep, cfg.format);
    if (cfg.format != pinscf::OutputFormat::Text) std::cout << "\n";
    return rep.converged ? 0 : kExitNotConverged;
}

int run_analyze_cmd(const std::string& lambda_csv, const std::string& format) {
    std::vector<double> lam = pinscf::parse_occupations(lambda_csv);
    pinscf::ConstraintReport rep = pinscf::run_analyze(lam, 3);
    if (format == "json")
        std::cout << rep.json() << "\n";
    else
        std::cout << analyze_text(rep, lam);
    return 0;
}

int run_verify_cmd(const std::string& suite, unsigned seed) {
    pinscf::VerifySummary sum = pinscf::run_verify(suite, seed);
    for (const auto& c : sum.checks)
        std::printf("%s  %-55s  observed %.3e  tolerance %.3e\n", c.pass ? "PASS" : "FAIL",
                    c.name.c_str(), c.observed, c.tolerance);
    std::printf("%s: %zu checks, %s\n", sum.suite.c_str(), sum.checks.size(),
                sum.all_pass() ? "all passed" : "FAILURES PRESENT");
    return sum.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pinscf: pinned three-determinant MCSCF with occupation-number diagnostics"};
    app.require_subcommand(1);

    pinscf::RunConfig cfg;
    bool no_exponent_opt = false;
    std::string assignment = "auto";
    std::string format = "text";

    CLI::App* lith = app.add_subcommand("lithium", "run the lithium pipeline");
    lith->add_option("--m", cfg.M, "number of expansion functions delta_1..delta_M")
        ->check(CLI::PositiveNumber);
    lith->add_option("--z", cfg.Z, "nuclear charge")->check(CLI::PositiveNumber);
    lith->add_option("--a", cfg.a, "expansion exponent a")->check(CLI::PositiveNumber);
    lith->add_option("--b", cfg.b, "hydrogenic exponent b")->check(CLI::PositiveNumber);
    lith->add_flag("--no-exponent-opt", no_exponent_opt, "freeze (a, b) at the given values");
    lith->add_option("--assignment", assignment, "spin assignment policy")
        ->check(CLI::IsMember({"auto", "A", "B"}));
    lith->add_option("--tol-grad", cfg.solver.gradient_tolerance, "gradient norm tolerance")
        ->check(CLI::PositiveNumber);
    lith->add_option("--tol-energy", cfg.solver.energy_tolerance, "energy change tolerance")
        ->check(CLI::PositiveNumber);
    lith->add_option("--max-iter", cfg.solver.max_iterations, "iteration cap per stage")
        ->check(CLI::PositiveNumber);
    lith->add_option("--seed", cfg.solver.seed, "random seed for multistart");
    lith->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"text", "json", "csv"}));
    lith->add_option("--cache", cfg.cache_path, "integral table cache file");

    std::string lambda_csv;
    std::string analyze_format = "text";
    CLI::App* ana = app.add_subcommand("analyze", "analyze an occupation vector");
    ana->add_option("lambda", lambda_csv, "comma-separated occupation numbers")->required();
    ana->add_option("--format", analyze_format, "output format")
        ->check(CLI::IsMember({"text", "json"}));

    std::string suite;
    unsigned verify_seed = 12345;
    CLI::App* ver = app.add_subcommand("verify", "run an oracle verification suite");
    ver->add_option("suite", suite, "integrals, pinning, bounds, or all")->required();
    ver->add_option("--seed", verify_seed, "random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (lith->parsed()) {
            cfg.optimize_exponents = !no_exponent_opt;
            if (assignment != "auto") cfg.assignment = pinscf::parse_assignment(assignment);
            cfg.solver.assignment = cfg.assignment;
            if (format == "json")
                cfg.format = pinscf::OutputFormat::Json;
            else if (format == "csv")
                cfg.format = pinscf::OutputFormat::Csv;
            else
                cfg.format = pinscf::OutputFormat::Text;
            cfg.validate();
            return run_lithium_cmd(cfg);
        }
        if (ana->parsed()) return run_analyze_cmd(lambda_csv, analyze_format);
        if (ver->parsed()) return run_verify_cmd(suite, verify_seed);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitUsage;
}
