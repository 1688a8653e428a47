// Variational machinery.  The energy is linear in the projected integrals
// (h', g') over the first three rotated orbitals, so the 3x3 secular matrix
// is assembled from precomputed per-entry tensors and the orbital gradient
// follows from the chain rule through U = exp(eta), including the exact
// derivative of the matrix exponential at nonzero eta.
#include "pinscf/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <utility>

namespace pinscf {

void SolverConfig::validate() const {
    if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
    if (gradient_tolerance <= 0 || energy_tolerance <= 0 || finite_difference_step <= 0)
        throw std::invalid_argument("solver tolerances must be positive");
    if (multistart < 1) throw std::invalid_argument("multistart must be >= 1");
    if (natural_start_max_dim < 0) throw std::invalid_argument("natural_start_max_dim must be >= 0");
}

namespace {

using Eigen::Matrix3d;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::Vector3cd;
using Eigen::VectorXd;

// ---- packed antisymmetric generator ------------------------------------

// Strict lower triangle (p > q), lexicographic by (p, q), 0-based.
std::vector<std::pair<int, int>> eta_pairs(int K) {
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(static_cast<size_t>(K) * (K - 1) / 2);
    for (int p = 1; p < K; ++p)
        for (int q = 0; q < p; ++q) pairs.emplace_back(p, q);
    return pairs;
}

MatrixXd unpack_eta(const VectorXd& v, int K) {
    MatrixXd eta = MatrixXd::Zero(K, K);
    int i = 0;
    for (int p = 1; p < K; ++p)
        for (int q = 0; q < p; ++q, ++i) {
            eta(p, q) = v(i);
            eta(q, p) = -v(i);
        }
    return eta;
}

// exp(eta) for real antisymmetric eta via the hermitian matrix -i*eta.
MatrixXd exp_antisym(const MatrixXd& eta) {
    const int K = static_cast<int>(eta.rows());
    if (eta.norm() == 0.0) return MatrixXd::Identity(K, K);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(cplx(0, -1) * eta.cast<cplx>());
    Eigen::VectorXcd ph(K);
    for (int k = 0; k < K; ++k) ph(k) = std::exp(cplx(0, es.eigenvalues()(k)));
    return (es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint()).real();
}

// ---- secular matrix as a linear functional of (h', g') -----------------

struct CsfTensors {
    std::array<Matrix3d, 9> Mh;    // coefficient of h'(p,q), index 3p+q
    std::array<Matrix3d, 81> Mg;   // coefficient of g'(p,q,r,s), index ((3p+q)3+r)3+s
};

CsfTensors build_csf_tensors(SpinAssignment sa) {
    CsfTensors t;
    for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q) {
            IntegralTables unit(3, 0.0);
            unit.h(p, q) = 1.0;
            t.Mh[static_cast<size_t>(3 * p + q)] = csf_matrix(sa, unit).real();
        }
    for (int idx = 0; idx < 81; ++idx) {
        IntegralTables unit(3, 0.0);
        unit.g[static_cast<size_t>(idx)] = 1.0;
        t.Mg[static_cast<size_t>(idx)] = csf_matrix(sa, unit).real();
    }
    return t;
}

const CsfTensors& csf_tensors(SpinAssignment sa) {
    static const CsfTensors tA = build_csf_tensors(SpinAssignment::A);
    static const CsfTensors tB = build_csf_tensors(SpinAssignment::B);
    return sa == SpinAssignment::A ? tA : tB;
}

// h' and g' restricted to the first three rotated orbitals.
struct Projected {
    Matrix3d h;
    std::array<double, 81> g;
};

Projected project_tables(const IntegralTables& T) {
    Projected out;
    out.h = T.h.topLeftCorner(3, 3);
    for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q)
            for (int r = 0; r < 3; ++r)
                for (int s = 0; s < 3; ++s)
                    out.g[static_cast<size_t>(((3 * p + q) * 3 + r) * 3 + s)] = T.g4(p, q, r, s);
    return out;
}

Projected project_tables(const IntegralTables& T, const MatrixXd& U) {
    const int K = T.K;
    Projected out;
    Eigen::Matrix<double, Eigen::Dynamic, 3> U3 = U.leftCols(3);
    out.h = U3.transpose() * T.h * U3;
    // Contract the last slot first: R1[a,b,c,s], R2[a,b,r,s], R3[a,q,r,s].
    const size_t K2 = static_cast<size_t>(K) * K, K3 = K2 * K;
    std::vector<double> R1(K3 * 3), R2(K2 * 9), R3(static_cast<size_t>(K) * 27);
    for (size_t abc = 0; abc < K3; ++abc) {
        const double* row = T.g.data() + abc * K;
        for (int s = 0; s < 3; ++s) {
            double acc = 0.0;
            for (int d = 0; d < K; ++d) acc += row[d] * U3(d, s);
            R1[abc * 3 + s] = acc;
        }
    }
    for (size_t ab = 0; ab < K2; ++ab)
        for (int r = 0; r < 3; ++r)
            for (int s = 0; s < 3; ++s) {
                double acc = 0.0;
                for (int c = 0; c < K; ++c) acc += R1[(ab * K + c) * 3 + s] * U3(c, r);
                R2[(ab * 3 + r) * 3 + s] = acc;
            }
    for (int a = 0; a < K; ++a)
        for (int q = 0; q < 3; ++q)
            for (int r = 0; r < 3; ++r)
                for (int s = 0; s < 3; ++s) {
                    double acc = 0.0;
                    for (int b = 0; b < K; ++b)
                        acc += R2[((static_cast<size_t>(a) * K + b) * 3 + r) * 3 + s] * U3(b, q);
                    R3[((static_cast<size_t>(a) * 3 + q) * 3 + r) * 3 + s] = acc;
                }
    for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q)
            for (int r = 0; r < 3; ++r)
                for (int s = 0; s < 3; ++s) {
                    double acc = 0.0;
                    for (int a = 0; a < K; ++a)
                        acc += R3[((static_cast<size_t>(a) * 3 + q) * 3 + r) * 3 + s] * U3(a, p);
                    out.g[static_cast<size_t>(((3 * p + q) * 3 + r) * 3 + s)] = acc;
                }
    return out;
}

Matrix3d assemble_csf(const CsfTensors& t, const Projected& p) {
    Matrix3d M = Matrix3d::Zero();
    for (int i = 0; i < 9; ++i) M += p.h(i / 3, i % 3) * t.Mh[static_cast<size_t>(i)];
    for (int i = 0; i < 81; ++i) M += p.g[static_cast<size_t>(i)] * t.Mg[static_cast<size_t>(i)];
    return M;
}

// Derivatives of the Rayleigh quotient with respect to raw (h', g') entries
// at fixed coefficients.
struct EnergyModel {
    Matrix3d A;
    std::array<double, 81> B;
};

EnergyModel make_model(const Vector3cd& c, SpinAssignment sa) {
    const CsfTensors& t = csf_tensors(sa);
    double n = c.squaredNorm();
    if (n <= 0.0) throw std::invalid_argument("zero coefficient vector");
    EnergyModel m;
    for (int i = 0; i < 9; ++i)
        m.A(i / 3, i % 3) = (c.adjoint() * t.Mh[static_cast<size_t>(i)].cast<cplx>() * c)(0, 0).real() / n;
    for (int i = 0; i < 81; ++i)
        m.B[static_cast<size_t>(i)] =
            (c.adjoint() * t.Mg[static_cast<size_t>(i)].cast<cplx>() * c)(0, 0).real() / n;
    return m;
}

double model_energy(const EnergyModel& m, const Projected& p) {
    double e = 0.0;
    for (int i = 0; i < 9; ++i) e += m.A(i / 3, i % 3) * p.h(i / 3, i % 3);
    for (int i = 0; i < 81; ++i) e += m.B[static_cast<size_t>(i)] * p.g[static_cast<size_t>(i)];
    return e;
}

// dE/dU as a K x K matrix (columns >= 3 vanish: the ansatz only occupies the
// first three rotated orbitals).
MatrixXd orbital_grad_matrix(const EnergyModel& m, const IntegralTables& T, const MatrixXd& U) {
    const int K = T.K;
    Eigen::Matrix<double, Eigen::Dynamic, 3> U3 = U.leftCols(3);
    MatrixXd G = MatrixXd::Zero(K, K);
    G.leftCols(3) = T.h * U3 * (m.A + m.A.transpose());

    const size_t K2 = static_cast<size_t>(K) * K, K3 = K2 * K;
    auto bidx = [](int p, int q, int r, int s) {
        return static_cast<size_t>(((3 * p + q) * 3 + r) * 3 + s);
    };
    // P1[a,b,c,s] = sum_d g[a,b,c,d] U(d,s)
    std::vector<double> P1(K3 * 3);
    for (size_t abc = 0; abc < K3; ++abc) {
        const double* row = T.g.data() + abc * K;
        for (int s = 0; s < 3; ++s) {
            double acc = 0.0;
            for (int d = 0; d < K; ++d) acc += row[d] * U3(d, s);
            P1[abc * 3 + s] = acc;
        }
    }
    // P2[a,b,r,s] = sum_c P1[a,b,c,s] U(c,r)
    std::vector<double> P2(K2 * 9);
    for (size_t ab = 0; ab < K2; ++ab)
        for (int r = 0; r < 3; ++r)
            for (int s = 0; s < 3; ++s) {
                double acc = 0.0;
                for (int c = 0; c < K; ++c) acc += P1[(ab * K + c) * 3 + s] * U3(c, r);
                P2[(ab * 3 + r) * 3 + s] = acc;
            }
    // Slot 1: P3[a,q,r,s] = sum_b P2[a,b,r,s] U(b,q); W(e,t) += B[t,q,r,s] P3[e,q,r,s]
    for (int e = 0; e < K; ++e)
        for (int q = 0; q < 3; ++q)
            for (int r = 0; r < 3; ++r)
                for (int s = 0; s < 3; ++s) {
                    double p3 = 0.0;
                    for (int b = 0; b < K; ++b)
                        p3 += P2[((static_cast<size_t>(e) * K + b) * 3 + r) * 3 + s] * U3(b, q);
                    for (int t = 0; t < 3; ++t) G(e, t) += m.B[bidx(t, q, r, s)] * p3;
                }
    // Slot 2: P4[p,b,r,s] = sum_a U(a,p) P2[a,b,r,s]; W(e,t) += B[p,t,r,s] P4[p,e,r,s]
    for (int p = 0; p < 3; ++p)
        for (int e = 0; e < K; ++e)
            for (int r = 0; r < 3; ++r)
                for (int s = 0; s < 3; ++s) {
                    double p4 = 0.0;
                    for (int a = 0; a < K; ++a)
                        p4 += P2[((static_cast<size_t>(a) * K + e) * 3 + r) * 3 + s] * U3(a, p);
                    for (int t = 0; t < 3; ++t) G(e, t) += m.B[bidx(p, t, r, s)] * p4;
                }
    // Slot 3: P5[a,q,c,s] = sum_b U(b,q) P1[a,b,c,s]; P6[p,q,c,s] = sum_a U(a,p) P5;
    //         W(e,t) += B[p,q,t,s] P6[p,q,e,s]
    std::vector<double> P5(static_cast<size_t>(K) * 3 * K * 3);
    for (int a = 0; a < K; ++a)
        for (int q = 0; q < 3; ++q)
            for (int c = 0; c < K; ++c)
                for (int s = 0; s < 3; ++s) {
                    double acc = 0.0;
                    for (int b = 0; b < K; ++b)
                        acc += P1[((static_cast<size_t>(a) * K + b) * K + c) * 3 + s] * U3(b, q);
                    P5[((static_cast<size_t>(a) * 3 + q) * K + c) * 3 + s] = acc;
                }
    for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q)
            for (int e = 0; e < K; ++e)
                for (int s = 0; s < 3; ++s) {
                    double p6 = 0.0;
                    for (int a = 0; a < K; ++a)
                        p6 += P5[((static_cast<size_t>(a) * 3 + q) * K + e) * 3 + s] * U3(a, p);
                    for (int t = 0; t < 3; ++t) G(e, t) += m.B[bidx(p, q, t, s)] * p6;
                }
    // Slot 4: Q1[p,b,c,d] = sum_a U(a,p) g[a,b,c,d]; Q2[p,q,c,d]; Q3[p,q,r,d];
    //         W(e,t) += B[p,q,r,t] Q3[p,q,r,e]
    std::vector<double> Q1(3 * K3), Q2(9 * K2), Q3(27 * static_cast<size_t>(K));
    for (int p = 0; p < 3; ++p)
        for (size_t bcd = 0; bcd < K3; ++bcd) {
            double acc = 0.0;
            for (int a = 0; a < K; ++a) acc += T.g[static_cast<size_t>(a) * K3 + bcd] * U3(a, p);
            Q1[static_cast<size_t>(p) * K3 + bcd] = acc;
        }
    for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q)
            for (size_t cd = 0; cd < K2; ++cd) {
                double acc = 0.0;
                for (int b = 0; b < K; ++b)
                    acc += Q1[static_cast<size_t>(p) * K3 + static_cast<size_t>(b) * K2 + cd] * U3(b, q);
                Q2[(static_cast<size_t>(3 * p + q)) * K2 + cd] = acc;
            }
    for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q)
            for (int r = 0; r < 3; ++r)
                for (int e = 0; e < K; ++e) {
                    double acc = 0.0;
                    for (int c = 0; c < K; ++c)
                        acc += Q2[(static_cast<size_t>(3 * p + q)) * K2 + static_cast<size_t>(c) * K + e] * U3(c, r);
                    Q3[static_cast<size_t>((3 * p + q) * 3 + r) * K + e] = acc;
                }
    for (int e = 0; e < K; ++e)
        for (int t = 0; t < 3; ++t) {
            double acc = 0.0;
            for (int p = 0; p < 3; ++p)
                for (int q = 0; q < 3; ++q)
                    for (int r = 0; r < 3; ++r)
                        acc += m.B[bidx(p, q, r, t)] * Q3[static_cast<size_t>((3 * p + q) * 3 + r) * K + e];
            G(e, t) += acc;
        }
    return G;
}

// Gradient with respect to the packed eta entries, with the exact derivative
// of exp at the current eta (Loewner/Daleckii-Krein form in the eigenbasis).
VectorXd eta_gradient(const EnergyModel& m, const IntegralTables& T, const MatrixXd& eta) {
    const int K = T.K;
    const auto pairs = eta_pairs(K);
    VectorXd grad(static_cast<Eigen::Index>(pairs.size()));
    if (eta.norm() == 0.0) {
        MatrixXd G = orbital_grad_matrix(m, T, MatrixXd::Identity(K, K));
        for (size_t i = 0; i < pairs.size(); ++i)
            grad(static_cast<Eigen::Index>(i)) = G(pairs[i].first, pairs[i].second) - G(pairs[i].second, pairs[i].first);
        return grad;
    }
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(cplx(0, -1) * eta.cast<cplx>());
    const VectorXd& dv = es.eigenvalues();
    const MatrixXcd& W = es.eigenvectors();
    Eigen::VectorXcd ph(K);
    for (int k = 0; k < K; ++k) ph(k) = std::exp(cplx(0, dv(k)));
    MatrixXd U = (W * ph.asDiagonal() * W.adjoint()).real();
    MatrixXd G = orbital_grad_matrix(m, T, U);
    MatrixXcd N = W.adjoint() * G.transpose().cast<cplx>() * W;
    MatrixXcd F(K, K);
    for (int i = 0; i < K; ++i)
        for (int j = 0; j < K; ++j) {
            double mid = 0.5 * (dv(i) + dv(j)), hd = 0.5 * (dv(i) - dv(j));
            double sinc = std::abs(hd) < 1e-8 ? 1.0 - hd * hd / 6.0 : std::sin(hd) / hd;
            F(i, j) = std::exp(cplx(0, mid)) * sinc;
        }
    MatrixXcd Q = W * F.cwiseProduct(N) * W.adjoint();
    for (size_t i = 0; i < pairs.size(); ++i) {
        auto [p, q] = pairs[i];
        grad(static_cast<Eigen::Index>(i)) = (Q(q, p) - Q(p, q)).real();
    }
    return grad;
}

Vector3cd lowest_csf_vector(const Matrix3d& M, double& energy) {
    Eigen::SelfAdjointEigenSolver<Matrix3d> es(0.5 * (M + M.transpose()));
    energy = es.eigenvalues()(0);
    Eigen::Vector3d v = es.eigenvectors().col(0);
    int imax = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(v(i)) > std::abs(v(imax))) imax = i;
    if (v(imax) < 0) v = -v;
    return v.cast<cplx>();
}

// ---- alternating eigenstep / orbital-Newton stage ----------------------

struct StageOutcome {
    double energy = 0.0;
    Vector3cd c = Vector3cd(1, 0, 0);
    MatrixXd Utot;
    IntegralTables T;
    int iterations = 0;
    double gradient_norm = 0.0;
    bool converged = false;
    std::vector<double> trace;
};

StageOutcome run_stage(const IntegralTables& T0, const MatrixXd& U0, SpinAssignment sa,
                       bool fix_c, const SolverConfig& cfg) {
    const int K = T0.K;
    const auto pairs = eta_pairs(K);
    // Redundant directions: pairs acting entirely on orbitals the state never
    // occupies (both > 3 for the ansatz, both > 2 for the single determinant).
    const int qmax = fix_c ? 2 : 3;
    std::vector<int> active;
    for (size_t i = 0; i < pairs.size(); ++i)
        if (pairs[i].second < qmax) active.push_back(static_cast<int>(i));
    const int na = static_cast<int>(active.size());

    StageOutcome out;
    out.Utot = U0;
    out.T = (U0 - MatrixXd::Identity(K, K)).norm() == 0.0 ? T0 : rotate_orbitals(T0, U0);

    const CsfTensors& tens = csf_tensors(sa);
    const double delta = cfg.finite_difference_step;
    double E = 0.0, E_prev = std::numeric_limits<double>::infinity();
    Vector3cd c = Vector3cd(1, 0, 0);

    auto active_gradient = [&](const EnergyModel& model, const MatrixXd& eta) {
        VectorXd full = eta_gradient(model, out.T, eta);
        VectorXd g(na);
        for (int i = 0; i < na; ++i) g(i) = full(active[static_cast<size_t>(i)]);
        return g;
    };

    int it = 0;
    for (it = 0; it < cfg.max_iterations; ++it) {
        Matrix3d M = assemble_csf(tens, project_tables(out.T));
        if (fix_c)
            E = M(0, 0);
        else
            c = lowest_csf_vector(M, E);
        out.trace.push_back(E);

        EnergyModel model = make_model(c, sa);
        VectorXd g = active_gradient(model, MatrixXd::Zero(K, K));
        out.gradient_norm = g.norm();
        if (out.gradient_norm <= cfg.gradient_tolerance &&
            (it == 0 || std::abs(E_prev - E) <= cfg.energy_tolerance)) {
            out.converged = true;
            break;
        }
        E_prev = E;

        // Hessian: central differences of the analytic gradient along active
        // directions (exact through the exp chain, so no reanchoring error).
        MatrixXd H(na, na);
        for (int j = 0; j < na; ++j) {
            auto [p, q] = pairs[static_cast<size_t>(active[static_cast<size_t>(j)])];
            MatrixXd etaj = MatrixXd::Zero(K, K);
            etaj(p, q) = delta;
            etaj(q, p) = -delta;
            VectorXd gp = active_gradient(model, etaj);
            etaj(p, q) = -delta;
            etaj(q, p) = delta;
            VectorXd gm = active_gradient(model, etaj);
            H.col(j) = (gp - gm) / (2.0 * delta);
        }
        H = 0.5 * (H + H.transpose());
        Eigen::SelfAdjointEigenSolver<MatrixXd> hes(H);
        double hmax = std::max(std::abs(hes.eigenvalues()(0)), std::abs(hes.eigenvalues()(na - 1)));
        double floor = std::max(1e-8, 1e-6 * hmax);
        VectorXd gh = hes.eigenvectors().transpose() * g;
        for (int i = 0; i < na; ++i) gh(i) /= std::max(hes.eigenvalues()(i), floor);
        VectorXd newton = -(hes.eigenvectors() * gh);
        if (newton.norm() > 1.0) newton *= 1.0 / newton.norm();

        auto attempt = [&](const VectorXd& dir) -> std::optional<std::pair<double, MatrixXd>> {
            double scale = 1.0;
            for (int h = 0; h < 13; ++h, scale *= 0.5) {
                VectorXd full = VectorXd::Zero(static_cast<Eigen::Index>(pairs.size()));
                for (int i = 0; i < na; ++i) full(active[static_cast<size_t>(i)]) = scale * dir(i);
                MatrixXd Ustep = exp_antisym(unpack_eta(full, K));
                double Etry = model_energy(model, project_tables(out.T, Ustep));
                if (Etry < E) return std::make_pair(Etry, Ustep);
            }
            return std::nullopt;
        };
        auto step = attempt(newton);
        if (!step) {
            VectorXd sd = -g / std::max(1.0, out.gradient_norm);
            step = attempt(sd);
        }
        if (!step) {
            // Energy-comparison backtracking bottoms out at machine precision
            // while the analytic gradient still resolves much finer; polish
            // stationarity with the full Newton step, accepted on
            // gradient-norm decrease.
            VectorXd full = VectorXd::Zero(static_cast<Eigen::Index>(pairs.size()));
            for (int i = 0; i < na; ++i) full(active[static_cast<size_t>(i)]) = newton(i);
            MatrixXd Ustep = exp_antisym(unpack_eta(full, K));
            IntegralTables Ttry = rotate_orbitals(out.T, Ustep);
            Matrix3d Mtry = assemble_csf(tens, project_tables(Ttry));
            double Etry = E;
            Vector3cd ctry = c;
            if (fix_c)
                Etry = Mtry(0, 0);
            else
                ctry = lowest_csf_vector(Mtry, Etry);
            EnergyModel mtry = make_model(ctry, sa);
            VectorXd gfull = eta_gradient(mtry, Ttry, MatrixXd::Zero(K, K));
            VectorXd gact(na);
            for (int i = 0; i < na; ++i) gact(i) = gfull(active[static_cast<size_t>(i)]);
            if (gact.norm() < out.gradient_norm && Etry <= E + 10.0 * cfg.energy_tolerance) {
                out.T = Ttry;
                out.Utot = out.Utot * Ustep;
                continue;
            }
            out.converged = out.gradient_norm <= cfg.gradient_tolerance;
            break;
        }
        out.T = rotate_orbitals(out.T, step->second);
        out.Utot = out.Utot * step->second;
    }

    Matrix3d M = assemble_csf(tens, project_tables(out.T));
    if (fix_c)
        E = M(0, 0);
    else
        c = lowest_csf_vector(M, E);
    EnergyModel model = make_model(c, sa);
    out.gradient_norm = active_gradient(model, MatrixXd::Zero(K, K)).norm();
    out.energy = E;
    out.c = c;
    out.iterations = it;
    if (!out.trace.empty() && E < out.trace.back()) out.trace.push_back(E);
    return out;
}

// Compromise natural orbitals of the S_z = +1/2 sector ground state: the
// spatial 1-RDM sums the up and down spin blocks, which do not share
// eigenvectors in general.
std::optional<MatrixXd> natural_start(const IntegralTables& T, int max_dim) {
    const int K = T.K;
    long dim = static_cast<long>(K) * (K - 1) / 2 * K;
    if (dim > max_dim || 2 * K > kMaxOrbitals) return std::nullopt;
    SpinHamiltonian ham = SpinHamiltonian::from_spatial(T);
    CIResult ci = ci_ground(ham, sector_determinants(K, 2, 1));
    OneRDM rdm = one_rdm(ci.ground);
    MatrixXd rho(K, K);
    for (int p = 0; p < K; ++p)
        for (int q = 0; q < K; ++q)
            rho(p, q) = (rdm.rho(2 * p, 2 * q) + rdm.rho(2 * p + 1, 2 * q + 1)).real();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (rho + rho.transpose()));
    MatrixXd U(K, K);
    for (int j = 0; j < K; ++j) U.col(j) = es.eigenvectors().col(K - 1 - j);
    for (int j = 0; j < K; ++j) {
        int imax = 0;
        for (int i = 1; i < K; ++i)
            if (std::abs(U(i, j)) > std::abs(U(imax, j))) imax = i;
        if (U(imax, j) < 0) U.col(j) = -U.col(j);
    }
    return U;
}

}  // namespace

// ---- public operations -------------------------------------------------

ExponentResult optimize_exponents(int M, double Z, const SolverConfig& config, int N) {
    config.validate();
    if (M < 1) throw std::invalid_argument("optimize_exponents requires M >= 1");
    if (N < 1 || N > 3) throw std::invalid_argument("electron count must be 1, 2, or 3");
    int evals = 0;
    auto energy_at = [&](const Eigen::Vector2d& x) -> double {
        ++evals;
        double a = x(0), b = x(1);
        if (!(a > 0.05 && a < 80.0 && b > 0.05 && b < 80.0))
            return 1e6 + std::abs(a) + std::abs(b);
        try {
            // The trial determinant holds delta1(a) and chi1(b) only, so the
            // objective must not depend on M: orthogonalizing chi1 against the
            // higher delta_n (as the full M-member basis does) would change
            // the state, not just its representation.
            auto basis = build_basis(1, a, b);
            const RadialFunction& f0 = basis[0];
            double h00 = kinetic(f0, f0) + nuclear_attraction(f0, f0, Z);
            if (N == 1) return h00;
            double g0000 = coulomb_repulsion(f0, f0, f0, f0);
            if (N == 2) return 2.0 * h00 + g0000;
            const RadialFunction& fm = basis[1];
            double hmm = kinetic(fm, fm) + nuclear_attraction(fm, fm, Z);
            double g00mm = coulomb_repulsion(f0, f0, fm, fm);
            double g0mm0 = coulomb_repulsion(f0, fm, fm, f0);
            return 2.0 * h00 + hmm + g0000 + 2.0 * g00mm - g0mm0;
        } catch (const std::exception&) {
            return 1e6 + std::abs(a) + std::abs(b);
        }
    };

    // Deterministic coordinate descent over (a, b): a coarse scan brackets the
    // minimum on each axis, golden-section refines it.  The N <= 2 objectives
    // are flat along b, which collapses a simplex method but leaves per-axis
    // line searches well defined.
    const double lo_bound = 0.05, hi_bound = 4.0 * std::max(Z, 1.0);
    const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
    auto line_minimize = [&](Eigen::Vector2d x, int axis) -> std::pair<Eigen::Vector2d, double> {
        auto fat = [&](double t) {
            Eigen::Vector2d y = x;
            y(axis) = t;
            return energy_at(y);
        };
        constexpr int kGrid = 25;
        const double step = (hi_bound - lo_bound) / (kGrid - 1);
        int best = 0;
        double fbest = fat(lo_bound);
        for (int i = 1; i < kGrid; ++i) {
            double fi = fat(lo_bound + i * step);
            if (fi < fbest) {
                fbest = fi;
                best = i;
            }
        }
        double lo = lo_bound + std::max(0, best - 1) * step;
        double hi = lo_bound + std::min(kGrid - 1, best + 1) * step;
        double c = hi - inv_phi * (hi - lo), d = lo + inv_phi * (hi - lo);
        double fc = fat(c), fd = fat(d);
        while (hi - lo > 1e-10) {
            if (fc < fd) {
                hi = d;
                d = c;
                fd = fc;
                c = hi - inv_phi * (hi - lo);
                fc = fat(c);
            } else {
                lo = c;
                c = d;
                fc = fd;
                d = lo + inv_phi * (hi - lo);
                fd = fat(d);
            }
        }
        x(axis) = 0.5 * (lo + hi);
        return {x, fat(x(axis))};
    };

    Eigen::Vector2d x(std::max(0.6, 0.9 * Z), std::max(0.4, 0.45 * Z));
    double fx = energy_at(x);
    bool converged = false;
    for (int round = 0; round < config.max_iterations; ++round) {
        Eigen::Vector2d x_prev = x;
        double f_prev = fx;
        for (int axis = 0; axis < 2; ++axis) {
            auto [xn, fn] = line_minimize(x, axis);
            if (fn < fx) {
                x = xn;
                fx = fn;
            }
        }
        if (f_prev - fx <= 1e-12 && (x - x_prev).norm() <= 1e-8) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw std::runtime_error("optimize_exponents did not converge within max_iterations");
    return ExponentResult{x(0), x(1), fx, evals};
}

HFResult hf_preoptimize(const IntegralTables& tables, const SolverConfig& config) {
    config.validate();
    if (tables.K < 3) throw std::invalid_argument("hf_preoptimize needs at least 3 spatial orbitals");
    StageOutcome s = run_stage(tables, MatrixXd::Identity(tables.K, tables.K),
                               SpinAssignment::A, true, config);
    if (!s.converged) throw std::runtime_error("hf_preoptimize did not converge");
    HFResult out;
    out.energy = s.energy;
    out.rotation = OrbitalRotation::from_unitary(s.Utot.cast<cplx>());
    out.tables = rotate_orbitals(tables, s.Utot);
    out.iterations = s.iterations;
    out.gradient_norm = s.gradient_norm;
    return out;
}

SolveResult mcscf_solve(const IntegralTables& tables, const SolverConfig& config) {
    config.validate();
    const int K = tables.K;
    if (K < 3) throw std::invalid_argument("mcscf_solve needs at least 3 spatial orbitals");

    StageOutcome hf = run_stage(tables, MatrixXd::Identity(K, K), SpinAssignment::A, true, config);
    std::optional<MatrixXd> U_nat = natural_start(tables, config.natural_start_max_dim);

    std::vector<SpinAssignment> assignments;
    if (config.assignment)
        assignments.push_back(*config.assignment);
    else
        assignments = {SpinAssignment::A, SpinAssignment::B};

    std::optional<StageOutcome> best;
    SpinAssignment best_sa = SpinAssignment::A;
    const auto pairs = eta_pairs(K);
    for (size_t ai = 0; ai < assignments.size(); ++ai) {
        SpinAssignment sa = assignments[ai];
        std::vector<MatrixXd> starts;
        starts.push_back(hf.Utot);
        if (U_nat) {
            // Descending spatial occupation need not match the ansatz layout
            // (orbital 3 outweighs orbital 2 once beta^2 > 1/3), so seed every
            // permutation of the three active natural columns.
            static constexpr std::array<std::array<int, 3>, 6> kPerms = {
                {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
            for (const auto& pm : kPerms) {
                MatrixXd U = *U_nat;
                for (int j = 0; j < 3; ++j) U.col(j) = U_nat->col(pm[static_cast<size_t>(j)]);
                starts.push_back(U);
            }
        }
        std::mt19937_64 rng(config.seed + 1000003ull * static_cast<unsigned long long>(sa == SpinAssignment::B ? 1 : 0));
        std::normal_distribution<double> nd(0.0, 0.35);
        for (int r = 0; r < config.multistart; ++r) {
            VectorXd v(static_cast<Eigen::Index>(pairs.size()));
            for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = nd(rng);
            starts.push_back(hf.Utot * exp_antisym(unpack_eta(v, K)));
        }
        for (const MatrixXd& U0 : starts) {
            StageOutcome s = run_stage(tables, U0, sa, false, config);
            if (!best || s.energy < best->energy - 1e-12) {
                best = std::move(s);
                best_sa = sa;
            }
        }
    }

    // Canonical reporting: bring the dominant coefficient into the alpha
    // slot, swap to the assignment where |beta| >= |gamma| (both moves
    // relabel the same physical state), then absorb signs into the orbital
    // gauge.
    Vector3cd c = best->c;
    SpinAssignment sa = best_sa;
    MatrixXd Utot = best->Utot;
    // The column cycle (3,1,2) permutes the determinant roles: for A it sends
    // (alpha,beta,gamma) -> (-beta,-gamma,alpha), for B (gamma,-alpha,-beta);
    // every reordering inside each determinant is even, so no signs leak.
    {
        int dom = 0;
        for (int i = 1; i < 3; ++i)
            if (std::abs(c(i)) > std::abs(c(dom))) dom = i;
        int cycles = 0;
        if (dom == 1) cycles = (sa == SpinAssignment::A) ? 1 : 2;
        if (dom == 2) cycles = (sa == SpinAssignment::A) ? 2 : 1;
        for (int n = 0; n < cycles; ++n) {
            MatrixXd P = Utot;
            Utot.col(0) = P.col(2);
            Utot.col(1) = P.col(0);
            Utot.col(2) = P.col(1);
            c = (sa == SpinAssignment::A) ? Vector3cd(-c(1), -c(2), c(0))
                                          : Vector3cd(c(2), -c(0), -c(1));
        }
    }
    if (std::abs(c(1)) < std::abs(c(2))) {
        sa = (sa == SpinAssignment::A) ? SpinAssignment::B : SpinAssignment::A;
        c = Vector3cd(-c(0), c(2), c(1));
    }
    int imax = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(c(i)) > std::abs(c(imax))) imax = i;
    if (std::abs(c(imax)) > 0) c *= std::exp(cplx(0, -std::arg(c(imax))));
    double s1 = (c(1).real() < 0) ? -1.0 : 1.0;  // phi1 sign flips beta
    double s2 = (c(0).real() < 0) ? -1.0 : 1.0;  // phi2 sign flips alpha
    double s3 = (c(2).real() < 0) ? -1.0 : 1.0;  // phi3 sign flips gamma
    Utot.col(0) *= s1;
    Utot.col(1) *= s2;
    Utot.col(2) *= s3;

    SolveResult out;
    out.assignment = sa;
    out.rotation = OrbitalRotation::from_unitary(Utot.cast<cplx>());
    out.tables = rotate_orbitals(tables, Utot);
    Matrix3d M = assemble_csf(csf_tensors(sa), project_tables(out.tables));
    double E = 0.0;
    Vector3cd cf = lowest_csf_vector(M, E);
    out.energy = E;
    out.coefficients = BDCoefficients{cf(0), cf(1), cf(2)};
    EnergyModel model = make_model(cf, sa);
    out.gradient_norm = eta_gradient(model, out.tables, MatrixXd::Zero(K, K)).norm();
    out.iterations = best->iterations;
    out.converged = best->converged;
    out.energy_trace = best->trace;
    out.hf_energy = hf.energy;
    Wavefunction psi = bd_state(out.coefficients, sa);
    out.occupations = natural_occupations(one_rdm(psi)).occupations;
    return out;
}

int packed_dimension(int K) {
    if (K < 1) throw std::invalid_argument("K must be positive");
    return 6 + K * (K - 1) / 2;
}

namespace {

struct Unpacked {
    Vector3cd c;
    MatrixXd eta;
};

Unpacked unpack(const VectorXd& x, int K) {
    if (x.size() != packed_dimension(K))
        throw std::invalid_argument("packed parameter size mismatch");
    Unpacked u;
    u.c = Vector3cd(cplx(x(0), x(1)), cplx(x(2), x(3)), cplx(x(4), x(5)));
    if (u.c.squaredNorm() <= 0.0) throw std::invalid_argument("zero coefficient block");
    u.eta = unpack_eta(x.tail(x.size() - 6), K);
    return u;
}

}  // namespace

double packed_energy(const VectorXd& x, SpinAssignment sa, const IntegralTables& tables) {
    if (tables.K < 3) throw std::invalid_argument("packed_energy needs at least 3 spatial orbitals");
    Unpacked u = unpack(x, tables.K);
    MatrixXd U = exp_antisym(u.eta);
    Matrix3d M = assemble_csf(csf_tensors(sa), project_tables(tables, U));
    return (u.c.adjoint() * M.cast<cplx>() * u.c)(0, 0).real() / u.c.squaredNorm();
}

VectorXd packed_gradient(const VectorXd& x, SpinAssignment sa, const IntegralTables& tables) {
    if (tables.K < 3) throw std::invalid_argument("packed_gradient needs at least 3 spatial orbitals");
    Unpacked u = unpack(x, tables.K);
    MatrixXd U = exp_antisym(u.eta);
    Matrix3d M = assemble_csf(csf_tensors(sa), project_tables(tables, U));
    double n = u.c.squaredNorm();
    double E = (u.c.adjoint() * M.cast<cplx>() * u.c)(0, 0).real() / n;
    Vector3cd vres = M.cast<cplx>() * u.c - E * u.c;
    VectorXd grad(x.size());
    for (int i = 0; i < 3; ++i) {
        grad(2 * i) = 2.0 * vres(i).real() / n;
        grad(2 * i + 1) = 2.0 * vres(i).imag() / n;
    }
    EnergyModel model = make_model(u.c, sa);
    grad.tail(x.size() - 6) = eta_gradient(model, tables, u.eta);
    return grad;
}

}  // namespace pinscf
