// Pinning diagnostics and exactly pinned test Hamiltonians.  The pinned
// construction solves the eigenvector equations <D_i|H|Phi> = E0 <D_i|Phi>
// linearly over (h, g) and then polishes along the solution null space until
// every other sector eigenvalue clears E0 + gap.
#include "pinscf/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

#include <json.hpp>

namespace pinscf {

namespace {

SpectrumSummary summarize(Eigen::VectorXd ev) {
    std::sort(ev.data(), ev.data() + ev.size());
    SpectrumSummary s;
    const Eigen::Index n = ev.size();
    s.E0 = ev(0);
    s.E_ex_plus = ev(n - 1);
    s.degenerate = n > 1 && ev(1) - ev(0) <= 1e-9;
    s.E_ex_minus = s.E0;
    for (Eigen::Index i = 1; i < n; ++i)
        if (ev(i) > s.E0 + 1e-9) {
            s.E_ex_minus = ev(i);
            break;
        }
    return s;
}

constexpr long kMaxSpectrumSpace = 100000;

}  // namespace

SpectrumSummary spectrum_summary(const SpinHamiltonian& ham, int N) {
    auto dets = all_determinants(ham.d, N);
    if (static_cast<long>(dets.size()) > kMaxSpectrumSpace)
        throw std::invalid_argument("spectrum_summary: determinant space too large");
    Eigen::MatrixXd H = hamiltonian_matrix(ham, dets);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
    return summarize(es.eigenvalues());
}

SpectrumSummary spectrum_summary(const IntegralTables& tables, int N) {
    auto dets = sector_determinants(tables.K, N - N / 2, N / 2);
    if (static_cast<long>(dets.size()) > kMaxSpectrumSpace)
        throw std::invalid_argument("spectrum_summary: determinant space too large");
    SpinHamiltonian ham = SpinHamiltonian::from_spatial(tables);
    Eigen::MatrixXd H = hamiltonian_matrix(ham, dets);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
    return summarize(es.eigenvalues());
}

BoundReport bound_report(const IntegralTables& tables, const SolverConfig& config,
                         const std::optional<CorrelationRefs>& refs) {
    config.validate();
    if (tables.K < 3) throw std::invalid_argument("bound_report needs at least 3 spatial orbitals");
    const int N = 3;

    SpectrumSummary spectrum = spectrum_summary(tables, N);
    if (spectrum.degenerate)
        throw std::runtime_error("bound_report: degenerate ground state (gap <= 1e-9)");

    SpinHamiltonian ham = SpinHamiltonian::from_spatial(tables);
    CIResult ci = ci_ground(ham, sector_determinants(tables.K, 2, 1));
    NaturalBasis nat = natural_occupations(one_rdm(ci.ground));

    HFResult hf = hf_preoptimize(tables, config);
    SolveResult mc = mcscf_solve(tables, config);

    BoundReport r;
    r.E0 = ci.energy;
    r.E_HF = hf.energy;
    r.E_D = mc.energy;
    r.delta_E = r.E_D - r.E0;
    r.E_corr = r.E_HF - r.E0;
    r.non = nat.occupations;

    std::vector<double> top6(nat.occupations.values.begin(),
                             nat.occupations.values.begin() + std::min(6, nat.occupations.dimension()));
    top6.resize(6, 0.0);
    r.D_value = bd_inequality(OccupationVector(top6));
    r.S_value = distance_to_hf(nat.occupations, N);

    if (r.E_corr > 1e-8) r.ratio_energy = r.delta_E / r.E_corr;
    if (r.S_value > 1e-8) r.ratio_geometry = r.D_value / r.S_value;
    if (r.ratio_energy && r.ratio_geometry && *r.ratio_geometry > 0.0)
        r.K_empirical = *r.ratio_energy / *r.ratio_geometry;

    auto recovery = [&](const std::string& label, double ehf, double eexact) {
        CorrelationRecovery rec;
        rec.label = label;
        rec.e_hf_ref = ehf;
        rec.e_exact_ref = eexact;
        if (ehf - eexact > 1e-8) rec.percent = 100.0 * (ehf - r.E_D) / (ehf - eexact);
        return rec;
    };
    r.recoveries.push_back(recovery("basis-internal", r.E_HF, r.E0));
    if (refs) {
        r.recoveries.push_back(recovery("literature-HF", refs->hf_literature, refs->exact_literature));
        r.recoveries.push_back(
            recovery("single-determinant", refs->single_determinant, refs->exact_literature));
        std::string match;
        for (const auto& rec : r.recoveries)
            if (rec.percent && std::abs(*rec.percent - 87.09) < 0.5) match = rec.label;
        if (!match.empty())
            r.recovery_note = "variant '" + match + "' reproduces the 87.09% recovery figure";
        else
            r.recovery_note =
                "no variant reproduces 87.09%: the pinned optimum in this basis recovers the "
                "listed percentages of each reference correlation energy";
    } else {
        r.recovery_note = "literature references not supplied; basis-internal recovery only";
    }
    return r;
}

std::vector<BoundReport> quasipinning_scan(const IntegralTables& tables,
                                           const std::vector<double>& couplings,
                                           const SolverConfig& config) {
    std::vector<BoundReport> rows;
    rows.reserve(couplings.size());
    for (double c : couplings) {
        IntegralTables scaled = tables;
        for (double& v : scaled.g) v *= c;
        BoundReport r = bound_report(scaled, config);
        r.coupling = c;
        rows.push_back(std::move(r));
    }
    return rows;
}

std::string bound_csv_header() { return "coupling,E0,E_HF,E_D,delta_E,E_corr,D,S"; }

std::string bound_csv_row(const BoundReport& report) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g",
                  report.coupling, report.E0, report.E_HF, report.E_D, report.delta_E,
                  report.E_corr, report.D_value, report.S_value);
    return buf;
}

std::string BoundReport::json() const {
    nlohmann::json j;
    j["coupling"] = coupling;
    j["E0"] = E0;
    j["E_HF"] = E_HF;
    j["E_D"] = E_D;
    j["delta_E"] = delta_E;
    j["E_corr"] = E_corr;
    j["D_value"] = D_value;
    j["S_value"] = S_value;
    j["ratio_energy"] = ratio_energy ? nlohmann::json(*ratio_energy) : nlohmann::json();
    j["ratio_geometry"] = ratio_geometry ? nlohmann::json(*ratio_geometry) : nlohmann::json();
    j["K_empirical"] = K_empirical ? nlohmann::json(*K_empirical) : nlohmann::json();
    j["non"] = non.values;
    j["recoveries"] = nlohmann::json::array();
    for (const auto& rec : recoveries) {
        nlohmann::json e;
        e["label"] = rec.label;
        e["e_hf_ref"] = rec.e_hf_ref;
        e["e_exact_ref"] = rec.e_exact_ref;
        e["percent"] = rec.percent ? nlohmann::json(*rec.percent) : nlohmann::json();
        j["recoveries"].push_back(e);
    }
    j["recovery_note"] = recovery_note;
    return j.dump(2);
}

namespace {

// splitmix64: decorrelates retry streams from the user seed.
unsigned long long mix_seed(unsigned long long z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

struct PinnedBasisOps {
    // 27 basis Hamiltonians over the 9 sector determinants: 6 symmetric h
    // units, then 21 two-electron symmetry classes.
    std::vector<Eigen::MatrixXd> M;
    std::vector<std::array<int, 2>> h_units;      // (p, q), p <= q
    std::vector<std::array<int, 4>> g_units;      // class representative (p,q,r,s)
    std::vector<Determinant> dets;
};

const PinnedBasisOps& pinned_basis_ops() {
    static const PinnedBasisOps ops = [] {
        PinnedBasisOps o;
        o.dets = sector_determinants(3, 2, 1);
        for (int p = 0; p < 3; ++p)
            for (int q = p; q < 3; ++q) o.h_units.push_back({p, q});
        std::vector<std::array<int, 2>> pairs;
        for (int p = 0; p < 3; ++p)
            for (int q = p; q < 3; ++q) pairs.push_back({p, q});
        for (size_t P = 0; P < pairs.size(); ++P)
            for (size_t Q = P; Q < pairs.size(); ++Q)
                o.g_units.push_back({pairs[P][0], pairs[P][1], pairs[Q][0], pairs[Q][1]});
        for (const auto& hu : o.h_units) {
            IntegralTables t(3, 0.0);
            t.h(hu[0], hu[1]) = 1.0;
            t.h(hu[1], hu[0]) = 1.0;
            o.M.push_back(hamiltonian_matrix(SpinHamiltonian::from_spatial(t), o.dets));
        }
        for (const auto& gu : o.g_units) {
            IntegralTables t(3, 0.0);
            t.set_g(gu[0], gu[1], gu[2], gu[3], 1.0);
            o.M.push_back(hamiltonian_matrix(SpinHamiltonian::from_spatial(t), o.dets));
        }
        return o;
    }();
    return ops;
}

IntegralTables assemble_pinned(const Eigen::VectorXd& t) {
    const PinnedBasisOps& ops = pinned_basis_ops();
    IntegralTables out(3, 0.0);
    for (size_t i = 0; i < ops.h_units.size(); ++i) {
        out.h(ops.h_units[i][0], ops.h_units[i][1]) = t(static_cast<Eigen::Index>(i));
        out.h(ops.h_units[i][1], ops.h_units[i][0]) = t(static_cast<Eigen::Index>(i));
    }
    for (size_t i = 0; i < ops.g_units.size(); ++i) {
        const auto& gu = ops.g_units[i];
        out.set_g(gu[0], gu[1], gu[2], gu[3], t(static_cast<Eigen::Index>(ops.h_units.size() + i)));
    }
    return out;
}

std::optional<PinnedTables> try_pinned(unsigned long long stream) {
    const PinnedBasisOps& ops = pinned_basis_ops();
    const int nparam = static_cast<int>(ops.M.size());
    const int ndet = static_cast<int>(ops.dets.size());
    const double E0 = -3.0, gap_target = 0.6;

    std::mt19937_64 rng(stream);
    std::uniform_real_distribution<double> ua(0.5, 0.9), uf(0.55, 0.95);
    double a2 = ua(rng), frac = uf(rng);
    BDCoefficients c{std::sqrt(a2), std::sqrt(frac * (1.0 - a2)),
                     std::sqrt((1.0 - frac) * (1.0 - a2))};
    Wavefunction phi_wf = bd_state(c, SpinAssignment::A);
    Eigen::VectorXd phi(ndet);
    for (int i = 0; i < ndet; ++i) phi(i) = phi_wf.amplitude(ops.dets[static_cast<size_t>(i)]).real();

    // <D_i|H|Phi> = E0 <D_i|Phi>, linear in the parameter vector.
    Eigen::MatrixXd A(ndet, nparam);
    for (int k = 0; k < nparam; ++k) A.col(k) = ops.M[static_cast<size_t>(k)] * phi;
    Eigen::VectorXd b = E0 * phi;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeFullV);
    Eigen::VectorXd t0 = svd.solve(b);
    if ((A * t0 - b).norm() > 1e-8) return std::nullopt;  // eigenvector equations inconsistent
    double smax = svd.singularValues()(0);
    int rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > 1e-10 * smax) ++rank;
    Eigen::MatrixXd null = svd.matrixV().rightCols(nparam - rank);

    std::normal_distribution<double> nd(0.0, 1.0);
    Eigen::VectorXd xi(null.cols());
    for (Eigen::Index i = 0; i < xi.size(); ++i) xi(i) = nd(rng);

    // Hinge polish: push every non-Phi eigenvalue above E0 + gap_target.
    Eigen::VectorXd t;
    for (int polish = 0; polish < 300; ++polish) {
        t = t0 + null * xi;
        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(ndet, ndet);
        for (int k = 0; k < nparam; ++k) H += t(k) * ops.M[static_cast<size_t>(k)];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
        int iphi = 0;
        double best = -1.0;
        for (int i = 0; i < ndet; ++i) {
            double ov = std::abs(es.eigenvectors().col(i).dot(phi));
            if (ov > best) {
                best = ov;
                iphi = i;
            }
        }
        Eigen::VectorXd pen_grad = Eigen::VectorXd::Zero(xi.size());
        double penalty = 0.0;
        for (int i = 0; i < ndet; ++i) {
            if (i == iphi) continue;
            double short_fall = E0 + gap_target - es.eigenvalues()(i);
            if (short_fall <= 0.0) continue;
            penalty += short_fall * short_fall;
            // d lambda_i / d t_m = v' M_m v, chained through the null basis.
            Eigen::VectorXd v = es.eigenvectors().col(i);
            Eigen::VectorXd w(nparam);
            for (int m = 0; m < nparam; ++m) w(m) = v.dot(ops.M[static_cast<size_t>(m)] * v);
            pen_grad += -2.0 * short_fall * (null.transpose() * w);
        }
        if (penalty == 0.0) {
            // Success when Phi is the exact ground state with the full gap.
            if (best < 1.0 - 1e-9 || std::abs(es.eigenvalues()(iphi) - E0) > 1e-8 || iphi != 0)
                return std::nullopt;
            PinnedTables out;
            out.tables = assemble_pinned(t);
            out.coefficients = c;
            out.energy = es.eigenvalues()(0);
            out.gap = es.eigenvalues()(1) - es.eigenvalues()(0);
            return out;
        }
        xi -= 0.25 * pen_grad;
    }
    return std::nullopt;
}

}  // namespace

PinnedTables make_pinned_tables(unsigned seed) {
    for (int attempt = 0; attempt < 64; ++attempt) {
        auto r = try_pinned(mix_seed(static_cast<unsigned long long>(seed) + static_cast<unsigned long long>(attempt)));
        if (r) return *r;
    }
    throw std::runtime_error("make_pinned_tables: no pinned instance found (seed exhausted)");
}

}  // namespace pinscf
