// Pinned three-determinant ansatz: spin assignments, closed-form occupancies,
// orbital rotations, and the 3x3 secular matrix.
#include "pinscf/ansatz.hpp"

#include <algorithm>
#include <stdexcept>

namespace pinscf {

BDCoefficients BDCoefficients::normalized() const {
    double nn = std::sqrt(norm_sq());
    if (nn <= 0.0) throw std::runtime_error("cannot normalize a zero coefficient triple");
    return BDCoefficients{alpha / nn, beta / nn, gamma / nn};
}

void BDCoefficients::validate(double tol) const {
    if (std::abs(norm_sq() - 1.0) > tol)
        throw std::invalid_argument("coefficient triple is not normalized");
}

SpinAssignment parse_assignment(const std::string& s) {
    if (s == "A") return SpinAssignment::A;
    if (s == "B") return SpinAssignment::B;
    throw std::invalid_argument("unknown spin assignment: \"" + s + "\" (expected A or B)");
}

std::string to_string(SpinAssignment sa) { return sa == SpinAssignment::A ? "A" : "B"; }

namespace {

// Abstract levels 1..6 to canonical spin orbitals (2p-1 up, 2p down).
// A: phi1(up), phi2(up), phi1(dn), phi3(up), phi3(dn), phi2(dn).
// B: phi2(up), phi1(up), phi1(dn), phi3(up), phi2(dn), phi3(dn).
constexpr std::array<int, 6> kMapA = {1, 3, 2, 5, 6, 4};
constexpr std::array<int, 6> kMapB = {3, 1, 2, 5, 4, 6};

constexpr std::array<std::array<int, 3>, 3> kLevelConfigs = {{{1, 2, 3}, {1, 4, 5}, {2, 4, 6}}};

const std::array<int, 6>& level_map(SpinAssignment sa) {
    return sa == SpinAssignment::A ? kMapA : kMapB;
}

// (-1)^inversions picked up when sorting the mapped triple ascending.
double inversion_sign(const std::array<int, 3>& v) {
    int inv = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (v[i] > v[j]) ++inv;
    return (inv % 2 == 0) ? 1.0 : -1.0;
}

std::array<int, 3> mapped_config(SpinAssignment sa, int which) {
    const auto& map = level_map(sa);
    std::array<int, 3> out{};
    for (int k = 0; k < 3; ++k) out[k] = map[kLevelConfigs[which][k] - 1];
    return out;
}

}  // namespace

int assignment_spin_orbital(SpinAssignment sa, int level) {
    if (level < 1 || level > 6) throw std::invalid_argument("assignment level must be in 1..6");
    return level_map(sa)[level - 1];
}

std::array<Determinant, 3> assignment_determinants(SpinAssignment sa) {
    std::array<Determinant, 3> dets;
    for (int i = 0; i < 3; ++i) {
        auto cfg = mapped_config(sa, i);
        dets[i] = Determinant::from_orbitals({cfg[0], cfg[1], cfg[2]});
    }
    return dets;
}

std::array<double, 3> assignment_signs(SpinAssignment sa) {
    std::array<double, 3> signs{};
    for (int i = 0; i < 3; ++i) signs[i] = inversion_sign(mapped_config(sa, i));
    return signs;
}

Wavefunction bd_state(const BDCoefficients& c, SpinAssignment sa) {
    auto dets = assignment_determinants(sa);
    auto signs = assignment_signs(sa);
    std::array<cplx, 3> amps = {c.alpha, c.beta, c.gamma};
    Wavefunction psi(6, 3);
    for (int i = 0; i < 3; ++i) psi.set(dets[i], signs[i] * amps[i]);
    return psi;
}

bool check_selfconsistency(const BDCoefficients& c, double eps) {
    double b = std::abs(c.beta), g = std::abs(c.gamma);
    bool ordering = b >= g - eps;
    bool dominance = std::norm(c.alpha) >= std::norm(c.beta) + std::norm(c.gamma) - eps;
    return ordering && dominance;
}

OccupationVector bd_non_closed_form(const BDCoefficients& c) {
    BDCoefficients n = c.normalized();
    double a2 = std::norm(n.alpha), b2 = std::norm(n.beta), g2 = std::norm(n.gamma);
    return OccupationVector({a2 + b2, a2 + g2, a2, b2 + g2, b2, g2});
}

OrbitalRotation::OrbitalRotation(Eigen::MatrixXcd gen) : generator(std::move(gen)) {
    if (generator.rows() != generator.cols())
        throw std::invalid_argument("rotation generator must be square");
    double scale = std::max(1.0, generator.norm());
    if ((generator + generator.adjoint()).norm() > 1e-12 * scale)
        throw std::invalid_argument("rotation generator must be antihermitian");
}

Eigen::MatrixXcd OrbitalRotation::unitary() const {
    const int K = dimension();
    if (K == 0) return Eigen::MatrixXcd::Identity(0, 0);
    // exp(G) for antihermitian G via the hermitian matrix -iG.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(cplx(0, -1) * generator);
    if (es.info() != Eigen::Success) throw std::runtime_error("rotation eigendecomposition failed");
    Eigen::VectorXcd phases(K);
    for (int k = 0; k < K; ++k) phases(k) = std::exp(cplx(0, es.eigenvalues()(k)));
    Eigen::MatrixXcd U =
        es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    if ((U * U.adjoint() - Eigen::MatrixXcd::Identity(K, K)).norm() > 1e-10 * std::sqrt(K))
        throw std::runtime_error("exponential lost unitarity");
    return U;
}

OrbitalRotation OrbitalRotation::identity(int K) {
    if (K < 0) throw std::invalid_argument("rotation dimension must be nonnegative");
    return OrbitalRotation(Eigen::MatrixXcd::Zero(K, K));
}

OrbitalRotation OrbitalRotation::from_unitary(const Eigen::MatrixXcd& U) {
    const int K = static_cast<int>(U.rows());
    if (U.cols() != K) throw std::invalid_argument("unitary matrix must be square");
    if ((U * U.adjoint() - Eigen::MatrixXcd::Identity(K, K)).norm() > 1e-8 * std::max(1.0, std::sqrt(K)))
        throw std::invalid_argument("matrix is not unitary");
    // U is normal, so the Schur form is diagonal up to roundoff.
    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(U);
    if (schur.info() != Eigen::Success) throw std::runtime_error("Schur decomposition failed");
    Eigen::VectorXcd logs(K);
    for (int k = 0; k < K; ++k) {
        cplx t = schur.matrixT()(k, k);
        logs(k) = cplx(0.0, std::arg(t));  // principal branch; |t| = 1
    }
    Eigen::MatrixXcd L = schur.matrixU() * logs.asDiagonal() * schur.matrixU().adjoint();
    L = 0.5 * (L - L.adjoint());  // exact antihermitian representative
    OrbitalRotation rot(L);
    if ((rot.unitary() - U).norm() > 1e-8 * std::max(1.0, U.norm()))
        throw std::runtime_error("unitary logarithm verification failed");
    return rot;
}

IntegralTables rotate_orbitals(const IntegralTables& tables, const OrbitalRotation& rotation) {
    if (rotation.dimension() != tables.K)
        throw std::invalid_argument("rotation dimension does not match tables");
    Eigen::MatrixXcd Uc = rotation.unitary();
    if (Uc.imag().norm() > 1e-10 * std::max(1.0, Uc.norm()))
        throw std::invalid_argument("rotation is not real; real tables require a real unitary");
    return rotate_orbitals(tables, Eigen::MatrixXd(Uc.real()));
}

IntegralTables rotate_orbitals(const IntegralTables& tables, const Eigen::MatrixXd& U) {
    const int K = tables.K;
    if (U.rows() != K || U.cols() != K)
        throw std::invalid_argument("rotation dimension does not match tables");
    if ((U.transpose() * U - Eigen::MatrixXd::Identity(K, K)).norm() > 1e-8 * std::max(1.0, std::sqrt(K)))
        throw std::invalid_argument("rotation matrix is not orthogonal");

    IntegralTables out(K, tables.Z);
    out.h = U.transpose() * tables.h * U;

    // (pq|rs) <- sum U_ap U_bq U_cr U_ds (ab|cd), one slot at a time (last first).
    const size_t K2 = static_cast<size_t>(K) * K;
    const size_t K3 = K2 * K;
    std::vector<double> t1(tables.g.size(), 0.0), t2(tables.g.size(), 0.0);
    // t1[a,b,c,s] = sum_d g[a,b,c,d] U(d,s)
    for (size_t abc = 0; abc < K3; ++abc) {
        const double* row = tables.g.data() + abc * K;
        for (int s = 0; s < K; ++s) {
            double acc = 0.0;
            for (int d = 0; d < K; ++d) acc += row[d] * U(d, s);
            t1[abc * K + s] = acc;
        }
    }
    // t2[a,b,r,s] = sum_c t1[a,b,c,s] U(c,r)
    for (size_t ab = 0; ab < K2; ++ab)
        for (int r = 0; r < K; ++r)
            for (int s = 0; s < K; ++s) {
                double acc = 0.0;
                for (int c = 0; c < K; ++c) acc += t1[(ab * K + c) * K + s] * U(c, r);
                t2[(ab * K + r) * K + s] = acc;
            }
    // t1[a,q,r,s] = sum_b t2[a,b,r,s] U(b,q)
    std::fill(t1.begin(), t1.end(), 0.0);
    for (int a = 0; a < K; ++a)
        for (int q = 0; q < K; ++q)
            for (int r = 0; r < K; ++r)
                for (int s = 0; s < K; ++s) {
                    double acc = 0.0;
                    for (int b = 0; b < K; ++b)
                        acc += t2[((static_cast<size_t>(a) * K + b) * K + r) * K + s] * U(b, q);
                    t1[((static_cast<size_t>(a) * K + q) * K + r) * K + s] = acc;
                }
    // out[p,q,r,s] = sum_a t1[a,q,r,s] U(a,p)
    for (int p = 0; p < K; ++p)
        for (int q = 0; q < K; ++q)
            for (int r = 0; r < K; ++r)
                for (int s = 0; s < K; ++s) {
                    double acc = 0.0;
                    for (int a = 0; a < K; ++a)
                        acc += t1[((static_cast<size_t>(a) * K + q) * K + r) * K + s] * U(a, p);
                    out.gref(p, q, r, s) = acc;
                }
    return out;
}

Eigen::Matrix3cd csf_matrix(SpinAssignment sa, const IntegralTables& tables) {
    if (tables.K < 3) throw std::invalid_argument("csf_matrix needs at least 3 spatial orbitals");
    // Project onto the first three spatial orbitals, then spin-embed.
    IntegralTables sub(3, tables.Z);
    sub.h = tables.h.topLeftCorner(3, 3);
    for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q)
            for (int r = 0; r < 3; ++r)
                for (int s = 0; s < 3; ++s) sub.gref(p, q, r, s) = tables.g4(p, q, r, s);
    SpinHamiltonian ham = SpinHamiltonian::from_spatial(sub);
    auto dets = assignment_determinants(sa);
    auto signs = assignment_signs(sa);
    Eigen::Matrix3cd M;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            M(i, j) = signs[i] * signs[j] * slater_condon(dets[i], dets[j], ham);
    return M;
}

double ansatz_energy(const BDCoefficients& c, SpinAssignment sa, const IntegralTables& tables) {
    double nn = c.norm_sq();
    if (nn <= 0.0) throw std::invalid_argument("zero coefficient triple has no energy");
    Eigen::Matrix3cd M = csf_matrix(sa, tables);
    Eigen::Vector3cd v(c.alpha, c.beta, c.gamma);
    return (v.adjoint() * M * v)(0, 0).real() / nn;
}

}  // namespace pinscf
