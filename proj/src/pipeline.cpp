// Orchestration for the CLI: the lithium pipeline, occupation-vector
// analysis, verification suites, and report formatting.
#include "pinscf/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace pinscf {

void RunConfig::validate() const {
    if (M < 1) throw std::invalid_argument("M must be >= 1");
    if (Z <= 0) throw std::invalid_argument("Z must be positive");
    if (a <= 0 || b <= 0) throw std::invalid_argument("exponents must be positive");
    solver.validate();
}

CorrelationRefs lithium_refs() {
    // cc-pVDZ Hartree-Fock, estimated exact, and the optimized single
    // determinant at (a, b) = (2.6864, 1.2751).
    return CorrelationRefs{-7.4324, -7.478, -7.4179};
}

namespace {

std::string assignment_label(const std::optional<SpinAssignment>& sa) {
    return sa ? to_string(*sa) : std::string("auto");
}

double single_det_energy_from(const IntegralTables& T) {
    // Slot 1 of the minimal (M=1) basis is chi_1 orthogonalized against
    // delta_1 alone, so this is exactly the |delta1 delta1 chi1| energy.
    return 2.0 * T.h(0, 0) + T.h(1, 1) + T.g4(0, 0, 0, 0) + 2.0 * T.g4(0, 0, 1, 1) -
           T.g4(0, 1, 1, 0);
}

std::string fmt6(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
}

}  // namespace

LithiumReport run_lithium(const RunConfig& cfg) {
    cfg.validate();
    LithiumReport rep;
    rep.config = cfg;
    SolverConfig scfg = cfg.solver;
    scfg.assignment = cfg.assignment;

    rep.a_used = cfg.a;
    rep.b_used = cfg.b;
    if (cfg.optimize_exponents) {
        rep.exponent_stage = optimize_exponents(cfg.M, cfg.Z, scfg);
        rep.a_used = rep.exponent_stage->a;
        rep.b_used = rep.exponent_stage->b;
    }

    IntegralTables tables;
    TablesCacheKey key{cfg.M, rep.a_used, rep.b_used, cfg.Z};
    bool cached = !cfg.cache_path.empty() && load_tables_cache(cfg.cache_path, key, tables);
    if (!cached) {
        tables = build_integral_tables(build_basis(cfg.M, rep.a_used, rep.b_used), cfg.Z);
        if (!cfg.cache_path.empty()) save_tables_cache(cfg.cache_path, key, tables);
    }

    rep.single_det_energy = single_det_energy_from(
        build_integral_tables(build_basis(1, rep.a_used, rep.b_used), cfg.Z));
    rep.hf = hf_preoptimize(tables, scfg);
    rep.solve = mcscf_solve(tables, scfg);
    rep.bound = bound_report(tables, scfg, lithium_refs());
    rep.converged = rep.solve.converged;
    return rep;
}

ConstraintReport run_analyze(const std::vector<double>& lam, int N) {
    return analyze_occupations(OccupationVector(lam), N);
}

std::vector<double> parse_occupations(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        size_t first = tok.find_first_not_of(" \t");
        if (first == std::string::npos) throw std::invalid_argument("empty occupation entry");
        size_t last = tok.find_last_not_of(" \t");
        std::string trimmed = tok.substr(first, last - first + 1);
        size_t used = 0;
        double v = std::stod(trimmed, &used);
        if (used != trimmed.size())
            throw std::invalid_argument("malformed occupation entry: " + trimmed);
        out.push_back(v);
    }
    if (out.empty()) throw std::invalid_argument("empty occupation vector");
    return out;
}

bool VerifySummary::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

namespace {

CheckResult check_max(const std::string& name, double tol, double observed) {
    return CheckResult{name, tol, observed, observed <= tol};
}

RadialFunction random_radial(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ua(0.8, 4.0), ub(0.8, 3.0), uc(-1.5, 1.5);
    int kind = static_cast<int>(rng() % 10);
    if (kind < 6) return shull_lowdin(kind + 1, ua(rng));
    if (kind == 6) return hydrogenic_chi(1, ub(rng));
    if (kind == 7) return hydrogenic_chi(2, ub(rng));
    // Random two-term combination for richer coverage.
    RadialFunction f = shull_lowdin(static_cast<int>(rng() % 6) + 1, ua(rng));
    RadialFunction g = hydrogenic_chi(static_cast<int>(rng() % 2) + 1, ub(rng));
    return add(scale(uc(rng), f), scale(uc(rng), g));
}

// Relative error with a unit floor so near-zero integrals compare absolutely.
double rel_err(double x, double y) {
    return std::abs(x - y) / std::max({std::abs(x), std::abs(y), 1.0});
}

void verify_integrals(std::vector<CheckResult>& checks, unsigned seed) {
    std::mt19937_64 rng(seed);
    const double tol = 1e-8;
    double worst[4] = {0, 0, 0, 0};
    const int per_type = 50;
    for (int type = 0; type < 4; ++type)
        for (int i = 0; i < per_type; ++i) {
            RadialFunction f = random_radial(rng), g = random_radial(rng);
            double closed = 0, quad = 0;
            switch (type) {
                case 0:
                    closed = overlap(f, g);
                    quad = quadrature::overlap(f, g);
                    break;
                case 1:
                    closed = kinetic(f, g);
                    quad = quadrature::kinetic(f, g);
                    break;
                case 2:
                    closed = nuclear_attraction(f, g, 3.0);
                    quad = quadrature::nuclear_attraction(f, g, 3.0);
                    break;
                case 3: {
                    RadialFunction h = random_radial(rng), k = random_radial(rng);
                    closed = coulomb_repulsion(f, g, h, k);
                    quad = quadrature::coulomb_repulsion(f, g, h, k);
                    break;
                }
            }
            worst[type] = std::max(worst[type], rel_err(closed, quad));
        }
    const char* names[4] = {"overlap", "kinetic", "nuclear_attraction", "coulomb_repulsion"};
    for (int type = 0; type < 4; ++type)
        checks.push_back(check_max(std::string("integrals/") + names[type] + "-max-rel (50 random)",
                                   tol, worst[type]));
}

// Self-consistent triples are drawn with margins (|a|^2 - |b|^2 - |g|^2 and
// |b|^2 - |g|^2 both bounded below) so the six occupancies stay separated and
// the natural-orbital transform is well conditioned.
BDCoefficients random_triple(std::mt19937_64& rng, bool self_consistent) {
    std::uniform_real_distribution<double> ph(0.0, 2.0 * 3.14159265358979323846);
    auto phase = [&]() { return std::exp(cplx(0.0, ph(rng))); };
    if (self_consistent) {
        std::uniform_real_distribution<double> ua(0.55, 0.95), uf(0.55, 0.95);
        double a2 = ua(rng), frac = uf(rng);
        return BDCoefficients{std::sqrt(a2) * phase(), std::sqrt(frac * (1.0 - a2)) * phase(),
                              std::sqrt((1.0 - frac) * (1.0 - a2)) * phase()};
    }
    std::normal_distribution<double> nd(0.0, 1.0);
    BDCoefficients c{cplx(nd(rng), nd(rng)), cplx(nd(rng), nd(rng)), cplx(nd(rng), nd(rng))};
    double nn = std::sqrt(c.norm_sq());
    return BDCoefficients{c.alpha / nn, c.beta / nn, c.gamma / nn};
}

void verify_pinning(std::vector<CheckResult>& checks, unsigned seed) {
    std::mt19937_64 rng(seed);
    NumberOperatorCombo facet = bd_facet_operator();
    auto eqs = bd_equality_operators();
    double worst_annihilation = 0, worst_closed_form = 0, worst_ineq = 0, worst_eq = 0;
    for (int i = 0; i < 1000; ++i) {
        SpinAssignment sa = (rng() % 2 == 0) ? SpinAssignment::A : SpinAssignment::B;
        // Pinning holds in the natural-orbital basis of each state.
        BDCoefficients c = random_triple(rng, true);
        Wavefunction psi = bd_state(c, sa);
        Wavefunction nat_psi = transform_to_natural_basis(psi);
        worst_annihilation =
            std::max(worst_annihilation, apply_number_combo(facet, nat_psi).norm());
        for (const auto& eq : eqs)
            worst_eq = std::max(worst_eq, apply_number_combo(eq, nat_psi).norm());
        NaturalBasis nat = natural_occupations(one_rdm(psi));
        OccupationVector closed = bd_non_closed_form(c);
        for (int k = 0; k < 6; ++k)
            worst_closed_form =
                std::max(worst_closed_form, std::abs(closed[k] - nat.occupations[k]));
        worst_ineq = std::max(worst_ineq, std::abs(bd_inequality(nat.occupations)));
        // Without self-consistency only the sorted spectrum matches.
        BDCoefficients cu = random_triple(rng, false);
        OccupationVector cs = bd_non_closed_form(cu).sorted_desc();
        NaturalBasis nu = natural_occupations(one_rdm(bd_state(cu, sa)));
        for (int k = 0; k < 6; ++k)
            worst_closed_form = std::max(worst_closed_form, std::abs(cs[k] - nu.occupations[k]));
    }
    checks.push_back(check_max("pinning/facet-annihilation-max-norm (1000 states)", 1e-10,
                               worst_annihilation));
    checks.push_back(check_max("pinning/equality-annihilation-max-norm (1000 states)", 1e-10,
                               worst_eq));
    checks.push_back(check_max("pinning/closed-form-vs-1rdm-max (2000 states)", 1e-12,
                               worst_closed_form));
    checks.push_back(
        check_max("pinning/inequality-pinned-max (1000 self-consistent)", 1e-12, worst_ineq));
}

void verify_bounds(std::vector<CheckResult>& checks, unsigned seed) {
    SolverConfig cfg;
    cfg.seed = seed;
    cfg.multistart = 2;
    for (int i = 0; i < 3; ++i) {
        PinnedTables p = make_pinned_tables(seed + static_cast<unsigned>(i));
        SolveResult s = mcscf_solve(p.tables, cfg);
        checks.push_back(check_max("bounds/pinned-deltaE seed+" + std::to_string(i), 1e-8,
                                   std::abs(s.energy - p.energy)));
    }
    // Coupling scan on a fixed well-gapped instance.
    IntegralTables T(3, 0.0);
    T.h = Eigen::Vector3d(-3.0, -2.0, -1.0).asDiagonal();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 0.2);
    for (int p = 0; p < 3; ++p)
        for (int q = p; q < 3; ++q)
            for (int r = 0; r < 3; ++r)
                for (int s = r; s < 3; ++s) {
                    if (p * 3 + q > r * 3 + s) continue;
                    double v = nd(rng);
                    if (p == q && r == s && p == r) v = std::abs(v) + 0.3;
                    T.set_g(p, q, r, s, v);
                }
    auto rows = quasipinning_scan(T, {0.0, 0.5, 1.0}, cfg);
    checks.push_back(check_max("bounds/scan-row-count-delta", 0.0,
                               std::abs(static_cast<double>(rows.size()) - 3.0)));
    checks.push_back(check_max("bounds/scan-endpoint-D (coupling 0)", 1e-12, std::abs(rows[0].D_value)));
    checks.push_back(
        check_max("bounds/scan-endpoint-deltaE (coupling 0)", 1e-8, std::abs(rows[0].delta_E)));
    double worst_var = 0.0;
    for (const auto& r : rows) worst_var = std::max({worst_var, -r.delta_E, -r.E_corr});
    checks.push_back(check_max("bounds/scan-variational-floor", 1e-10, worst_var));
}

}  // namespace

VerifySummary run_verify(const std::string& suite, unsigned seed) {
    VerifySummary out;
    out.suite = suite;
    if (suite == "integrals")
        verify_integrals(out.checks, seed);
    else if (suite == "pinning")
        verify_pinning(out.checks, seed);
    else if (suite == "bounds")
        verify_bounds(out.checks, seed);
    else if (suite == "all") {
        verify_integrals(out.checks, seed);
        verify_pinning(out.checks, seed);
        verify_bounds(out.checks, seed);
    } else {
        throw std::invalid_argument("unknown verify suite: " + suite +
                                    " (expected integrals, pinning, bounds, or all)");
    }
    return out;
}

std::string LithiumReport::json() const {
    nlohmann::json j;
    j["config"] = {{"M", config.M},
                   {"Z", config.Z},
                   {"a", config.a},
                   {"b", config.b},
                   {"optimize_exponents", config.optimize_exponents},
                   {"assignment", assignment_label(config.assignment)},
                   {"seed", config.solver.seed},
                   {"max_iterations", config.solver.max_iterations},
                   {"gradient_tolerance", config.solver.gradient_tolerance},
                   {"energy_tolerance", config.solver.energy_tolerance},
                   {"multistart", config.solver.multistart},
                   {"cache", config.cache_path}};
    j["a_used"] = a_used;
    j["b_used"] = b_used;
    if (exponent_stage)
        j["exponent_stage"] = {{"a", exponent_stage->a},
                               {"b", exponent_stage->b},
                               {"energy", exponent_stage->energy},
                               {"evaluations", exponent_stage->evaluations}};
    else
        j["exponent_stage"] = nullptr;
    j["single_det_energy"] = single_det_energy;
    j["hf"] = {{"energy", hf.energy},
               {"iterations", hf.iterations},
               {"gradient_norm", hf.gradient_norm}};
    j["mcscf"] = {
        {"energy", solve.energy},
        {"assignment", to_string(solve.assignment)},
        {"coefficients",
         {{"alpha", {solve.coefficients.alpha.real(), solve.coefficients.alpha.imag()}},
          {"beta", {solve.coefficients.beta.real(), solve.coefficients.beta.imag()}},
          {"gamma", {solve.coefficients.gamma.real(), solve.coefficients.gamma.imag()}}}},
        {"occupations", solve.occupations.values},
        {"hf_energy", solve.hf_energy},
        {"gradient_norm", solve.gradient_norm},
        {"iterations", solve.iterations},
        {"converged", solve.converged},
        {"energy_trace", solve.energy_trace}};
    j["bound"] = nlohmann::json::parse(bound.json());
    j["converged"] = converged;
    return j.dump(2);
}

std::string LithiumReport::text_table() const {
    std::ostringstream os;
    os << "lithium pipeline: M=" << config.M << " Z=" << fmt6(config.Z) << " a=" << fmt6(a_used)
       << " b=" << fmt6(b_used) << " assignment=" << assignment_label(config.assignment) << "\n";
    if (exponent_stage)
        os << "  exponent optimization: a*=" << fmt6(exponent_stage->a)
           << " b*=" << fmt6(exponent_stage->b) << " (" << exponent_stage->evaluations
           << " evaluations)\n";
    os << "  stage                     energy (hartree)\n";
    os << "  single determinant        " << fmt6(single_det_energy) << "\n";
    os << "  Hartree-Fock (basis)      " << fmt6(hf.energy) << "\n";
    os << "  pinned MCSCF              " << fmt6(solve.energy) << "   [assignment "
       << to_string(solve.assignment) << ", " << (solve.converged ? "converged" : "NOT converged")
       << ", " << solve.iterations << " iterations]\n";
    os << "  full CI (basis)           " << fmt6(bound.E0) << "\n";
    os << "  quasipinning: D=" << fmt6(bound.D_value) << "  S=" << fmt6(bound.S_value)
       << "  delta_E=" << fmt6(bound.delta_E) << "  E_corr=" << fmt6(bound.E_corr) << "\n";
    os << "  NON (top 6):";
    for (int i = 0; i < std::min(6, bound.non.dimension()); ++i) os << " " << fmt6(bound.non[i]);
    os << "\n  coefficients: alpha=" << fmt6(std::abs(solve.coefficients.alpha))
       << " beta=" << fmt6(std::abs(solve.coefficients.beta))
       << " gamma=" << fmt6(std::abs(solve.coefficients.gamma)) << "\n";
    os << "  recoveries:";
    for (const auto& rec : bound.recoveries) {
        os << " " << rec.label << "=";
        if (rec.percent)
            os << fmt6(*rec.percent) << "%";
        else
            os << "undefined";
    }
    os << "\n  " << bound.recovery_note << "\n";
    return os.str();
}

std::string LithiumReport::csv() const {
    return bound_csv_header() + "\n" + bound_csv_row(bound) + "\n";
}

std::string format_report(const LithiumReport& report, OutputFormat format) {
    switch (format) {
        case OutputFormat::Text:
            return report.text_table();
        case OutputFormat::Json:
            return report.json();
        case OutputFormat::Csv:
            return report.csv();
    }
    throw std::logic_error("unhandled output format");
}

}  // namespace pinscf
