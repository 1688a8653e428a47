// fock.cpp
#include "pinscf/fock.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace pinscf {

void OneRDM::validate(double herm_tol) const {
    if (rho.rows() != rho.cols()) throw std::invalid_argument("1-RDM not square");
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > herm_tol) {
        throw std::invalid_argument("1-RDM not hermitian");
    }
}

double NumberOperatorCombo::eigenvalue(const Determinant& det) const {
    double v = constant;
    for (size_t i = 0; i < weights.size(); ++i) {
        if (det.occupied(static_cast<int>(i) + 1)) v += weights[i];
    }
    return v;
}

bool NumberOperatorCombo::integer_valued(double tol) const {
    auto is_int = [tol](double x) { return std::abs(x - std::round(x)) <= tol; };
    if (!is_int(constant)) return false;
    return std::all_of(weights.begin(), weights.end(), is_int);
}

OneRDM one_rdm(const Wavefunction& psi) {
    const int d = psi.d;
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d, d);
    for (const auto& [det, amp] : psi.amplitudes) {
        for (int p : det.orbitals()) {
            rho(p - 1, p - 1) += std::norm(amp);
            for (int q = 1; q <= d; ++q) {
                if (q == p || det.occupied(q)) continue;
                Determinant moved{(det.mask ^ (1u << (p - 1))) | (1u << (q - 1))};
                auto it = psi.amplitudes.find(moved);
                if (it == psi.amplitudes.end()) continue;
                Determinant removed{det.mask ^ (1u << (p - 1))};
                double sign = ((det.occupied_below(p) + removed.occupied_below(q)) % 2) ? -1.0 : 1.0;
                // <a_q^dagger a_p> term contributing to rho(q-1, p-1)... rho(p,q) = <a_q^+ a_p>
                rho(q - 1, p - 1) += sign * std::conj(it->second) * amp;
            }
        }
    }
    // rho(p,q) = <a_q^dagger a_p>: the loop accumulated <moved|a_q^+ a_p|det>
    // into rho(q,p); transpose to match the convention.
    rho.transposeInPlace();
    return OneRDM(rho);
}

NaturalBasis natural_occupations(const OneRDM& rdm) {
    const int d = rdm.dimension();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rdm.rho);
    if (es.info() != Eigen::Success) throw std::runtime_error("1-RDM eigendecomposition failed");
    // decreasing order
    Eigen::VectorXd lam(d);
    Eigen::MatrixXcd U(d, d);
    for (int i = 0; i < d; ++i) {
        lam(i) = es.eigenvalues()(d - 1 - i);
        U.col(i) = es.eigenvectors().col(d - 1 - i);
    }
    // canonicalize degenerate blocks: rebuild each block's columns from
    // coordinate-axis projections so the output does not depend on solver
    // internals
    constexpr double kDegTol = 1e-12;
    int start = 0;
    while (start < d) {
        int end = start + 1;
        while (end < d && std::abs(lam(end) - lam(start)) <= kDegTol * std::max(1.0, std::abs(lam(start)))) {
            ++end;
        }
        int k = end - start;
        if (k > 1) {
            Eigen::MatrixXcd B = U.middleCols(start, k);
            Eigen::MatrixXcd P = B * B.adjoint();
            Eigen::MatrixXcd chosen(d, k);
            int got = 0;
            for (int axis = 0; axis < d && got < k; ++axis) {
                Eigen::VectorXcd w = P.col(axis);
                for (int j = 0; j < got; ++j) {
                    w -= chosen.col(j).dot(w) * chosen.col(j);
                }
                double nn = w.norm();
                if (nn > 1e-6) {
                    chosen.col(got++) = w / nn;
                }
            }
            if (got == k) U.middleCols(start, k) = chosen;
        }
        start = end;
    }
    // deterministic phases: largest-magnitude component real positive
    for (int i = 0; i < d; ++i) {
        int arg = 0;
        double best = -1.0;
        for (int r = 0; r < d; ++r) {
            double m = std::abs(U(r, i));
            if (m > best + 1e-12) {
                best = m;
                arg = r;
            }
        }
        cplx ph = U(arg, i) / std::abs(U(arg, i));
        U.col(i) /= ph;
    }
    OccupationVector occ;
    occ.values.assign(lam.data(), lam.data() + d);
    return {occ, U};
}

namespace {

// <det over new orbitals | det over old orbitals> with new_j = sum_p U(p,j) old_p.
cplx det_overlap(const Determinant& bnew, const Determinant& aold, const Eigen::MatrixXcd& U) {
    auto bo = bnew.orbitals();
    auto ao = aold.orbitals();
    const int n = static_cast<int>(bo.size());
    Eigen::MatrixXcd m(n, n);
    for (int r = 0; r < n; ++r) {
        for (int s = 0; s < n; ++s) {
            m(r, s) = std::conj(U(ao[static_cast<size_t>(s)] - 1, bo[static_cast<size_t>(r)] - 1));
        }
    }
    return m.determinant();
}

}  // namespace

Wavefunction transform_to_natural_basis(const Wavefunction& psi) {
    auto nat = natural_occupations(one_rdm(psi));
    Wavefunction out(psi.d, psi.n);
    for (const auto& bnew : all_determinants(psi.d, psi.n)) {
        cplx c{0.0, 0.0};
        for (const auto& [aold, amp] : psi.amplitudes) {
            c += det_overlap(bnew, aold, nat.orbitals) * amp;
        }
        if (std::abs(c) > 1e-14) out.set(bnew, c);
    }
    return out;
}

std::vector<Determinant> selection_rule_configs(const NumberOperatorCombo& op, int N, int d) {
    if (static_cast<int>(op.weights.size()) != d) {
        throw std::invalid_argument("operator dimension mismatch");
    }
    const bool exact = op.integer_valued();
    std::vector<Determinant> out;
    for (const auto& det : all_determinants(d, N)) {
        if (exact) {
            long long v = std::llround(op.constant);
            for (int i = 0; i < d; ++i) {
                if (det.occupied(i + 1)) v += std::llround(op.weights[static_cast<size_t>(i)]);
            }
            if (v == 0) out.push_back(det);
        } else if (std::abs(op.eigenvalue(det)) <= 1e-9) {
            out.push_back(det);
        }
    }
    return out;
}

Wavefunction apply_number_combo(const NumberOperatorCombo& op, const Wavefunction& psi) {
    if (static_cast<int>(op.weights.size()) != psi.d) {
        throw std::invalid_argument("operator dimension mismatch");
    }
    Wavefunction out(psi.d, psi.n);
    for (const auto& [det, amp] : psi.amplitudes) {
        cplx v = amp * op.eigenvalue(det);
        if (v != cplx{0.0, 0.0}) out.set(det, v);
    }
    return out;
}

NumberOperatorCombo bd_facet_operator() {
    return {2.0, {-1.0, -1.0, 0.0, -1.0, 0.0, 0.0}};
}

std::array<NumberOperatorCombo, 3> bd_equality_operators() {
    return {NumberOperatorCombo{1.0, {-1.0, 0.0, 0.0, 0.0, 0.0, -1.0}},
            NumberOperatorCombo{1.0, {0.0, -1.0, 0.0, 0.0, -1.0, 0.0}},
            NumberOperatorCombo{1.0, {0.0, 0.0, -1.0, -1.0, 0.0, 0.0}}};
}

SpinHamiltonian SpinHamiltonian::from_spatial(const IntegralTables& tables) {
    const int K = tables.K;
    SpinHamiltonian ham;
    ham.d = 2 * K;
    ham.h = Eigen::MatrixXd::Zero(ham.d, ham.d);
    for (int P = 0; P < ham.d; ++P) {
        for (int Q = 0; Q < ham.d; ++Q) {
            if (P % 2 == Q % 2) ham.h(P, Q) = tables.h(P / 2, Q / 2);
        }
    }
    ham.g.assign(static_cast<size_t>(ham.d) * ham.d * ham.d * ham.d, 0.0);
    for (int P = 0; P < ham.d; ++P) {
        for (int Q = 0; Q < ham.d; ++Q) {
            if (P % 2 != Q % 2) continue;
            for (int R = 0; R < ham.d; ++R) {
                for (int S = 0; S < ham.d; ++S) {
                    if (R % 2 != S % 2) continue;
                    ham.g[static_cast<size_t>(((P * ham.d + Q) * ham.d + R)) * ham.d + S] =
                        tables.g4(P / 2, Q / 2, R / 2, S / 2);
                }
            }
        }
    }
    return ham;
}

SpinHamiltonian SpinHamiltonian::from_arrays(Eigen::MatrixXd h_so, std::vector<double> g_so) {
    SpinHamiltonian ham;
    ham.d = static_cast<int>(h_so.rows());
    if (h_so.cols() != ham.d ||
        g_so.size() != static_cast<size_t>(ham.d) * ham.d * ham.d * ham.d) {
        throw std::invalid_argument("spin Hamiltonian array shape mismatch");
    }
    ham.h = std::move(h_so);
    ham.g = std::move(g_so);
    return ham;
}

double slater_condon(const Determinant& a, const Determinant& b, const SpinHamiltonian& ham) {
    std::uint32_t diffmask = a.mask ^ b.mask;
    int diff = std::popcount(diffmask);
    if (diff > 4) return 0.0;
    if (diff == 0) {
        auto occ = a.orbitals();
        double v = 0.0;
        for (size_t i = 0; i < occ.size(); ++i) {
            int p = occ[i] - 1;
            v += ham.h(p, p);
            for (size_t j = i + 1; j < occ.size(); ++j) {
                int q = occ[j] - 1;
                v += ham.g4(p, p, q, q) - ham.g4(p, q, q, p);
            }
        }
        return v;
    }
    Determinant onlyA{a.mask & ~b.mask};
    Determinant onlyB{b.mask & ~a.mask};
    if (diff == 2) {
        int m = onlyA.orbitals()[0];
        int p = onlyB.orbitals()[0];
        double sign = ((a.occupied_below(m) + b.occupied_below(p)) % 2) ? -1.0 : 1.0;
        double v = ham.h(m - 1, p - 1);
        Determinant common{a.mask & b.mask};
        for (int q : common.orbitals()) {
            v += ham.g4(m - 1, p - 1, q - 1, q - 1) - ham.g4(m - 1, q - 1, q - 1, p - 1);
        }
        return sign * v;
    }
    auto ao = onlyA.orbitals();
    auto bo = onlyB.orbitals();
    int m = ao[0], n = ao[1], p = bo[0], q = bo[1];
    Determinant am{a.mask ^ (1u << (m - 1))};
    Determinant bp{b.mask ^ (1u << (p - 1))};
    int s = a.occupied_below(m) + am.occupied_below(n) + b.occupied_below(p) + bp.occupied_below(q);
    double sign = (s % 2) ? -1.0 : 1.0;
    return sign * (ham.g4(m - 1, p - 1, n - 1, q - 1) - ham.g4(m - 1, q - 1, n - 1, p - 1));
}

double slater_condon(const Determinant& a, const Determinant& b, const IntegralTables& tables) {
    return slater_condon(a, b, SpinHamiltonian::from_spatial(tables));
}

Eigen::MatrixXd hamiltonian_matrix(const SpinHamiltonian& ham, const std::vector<Determinant>& dets) {
    const int n = static_cast<int>(dets.size());
    Eigen::MatrixXd H(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double v = slater_condon(dets[static_cast<size_t>(i)], dets[static_cast<size_t>(j)], ham);
            H(i, j) = v;
            H(j, i) = v;
        }
    }
    return H;
}

namespace {

CIResult package_ci(const std::vector<Determinant>& dets, const SpinHamiltonian& ham,
                    double e0, const Eigen::VectorXd& v0, double e1) {
    CIResult res;
    res.energy = e0;
    res.gap = (dets.size() > 1) ? e1 - e0 : 0.0;
    int dmax = 0;
    for (const auto& det : dets) {
        dmax = std::max(dmax, det.orbitals().empty() ? 0 : det.orbitals().back());
    }
    Wavefunction psi(std::max(ham.d, dmax), dets.empty() ? 0 : dets[0].count());
    // deterministic global sign: largest component positive
    int arg = 0;
    v0.cwiseAbs().maxCoeff(&arg);
    double flip = v0(arg) < 0 ? -1.0 : 1.0;
    for (size_t i = 0; i < dets.size(); ++i) {
        double c = flip * v0(static_cast<Eigen::Index>(i));
        if (std::abs(c) > 1e-15) psi.set(dets[i], c);
    }
    res.ground = psi;
    // residual ||Hv - E v||
    Eigen::VectorXd hv = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dets.size()));
    for (size_t i = 0; i < dets.size(); ++i) {
        for (size_t j = 0; j < dets.size(); ++j) {
            double el = slater_condon(dets[i], dets[j], ham);
            if (el != 0.0) hv(static_cast<Eigen::Index>(i)) += el * flip * v0(static_cast<Eigen::Index>(j));
        }
    }
    Eigen::VectorXd v = flip * v0;
    res.residual = (hv - e0 * v).norm();
    return res;
}

}  // namespace

CIResult ci_ground(const SpinHamiltonian& ham, const std::vector<Determinant>& dets,
                   int dense_threshold) {
    if (dets.empty()) throw std::invalid_argument("empty determinant list");
    const int n = static_cast<int>(dets.size());
    if (n <= dense_threshold) {
        Eigen::MatrixXd H = hamiltonian_matrix(ham, dets);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
        if (es.info() != Eigen::Success) throw std::runtime_error("dense diagonalization failed");
        double e1 = (n > 1) ? es.eigenvalues()(1) : es.eigenvalues()(0);
        return package_ci(dets, ham, es.eigenvalues()(0), es.eigenvectors().col(0), e1);
    }
    // Lanczos with full reorthogonalization; matrix-free over Slater-Condon.
    auto matvec = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                double el = slater_condon(dets[static_cast<size_t>(i)], dets[static_cast<size_t>(j)], ham);
                if (el != 0.0) y(i) += el * x(j);
            }
        }
        return y;
    };
    std::mt19937_64 rng(20240913u);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd q = Eigen::VectorXd::NullaryExpr(n, [&](Eigen::Index) { return gauss(rng); });
    q.normalize();
    const int maxit = std::min(n, 400);
    std::vector<Eigen::VectorXd> basis;
    std::vector<double> alpha, beta;
    Eigen::VectorXd prev = Eigen::VectorXd::Zero(n);
    double prev_beta = 0.0;
    double e0 = 0.0, e1 = 0.0;
    Eigen::VectorXd ritz;
    for (int it = 0; it < maxit; ++it) {
        basis.push_back(q);
        Eigen::VectorXd w = matvec(q) - prev_beta * prev;
        double a_it = q.dot(w);
        alpha.push_back(a_it);
        w -= a_it * q;
        for (const auto& b : basis) w -= b.dot(w) * b;  // full reorthogonalization
        double b_it = w.norm();
        const int m = static_cast<int>(alpha.size());
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            T(i, i) = alpha[static_cast<size_t>(i)];
            if (i + 1 < m) {
                T(i, i + 1) = beta[static_cast<size_t>(i)];
                T(i + 1, i) = beta[static_cast<size_t>(i)];
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        e0 = es.eigenvalues()(0);
        e1 = (m > 1) ? es.eigenvalues()(1) : e0;
        double resid = (m > 0) ? std::abs(b_it * es.eigenvectors()(m - 1, 0)) : 1.0;
        if ((resid < 1e-11 && m > 2) || b_it < 1e-12 || it == maxit - 1) {
            ritz = Eigen::VectorXd::Zero(n);
            for (int i = 0; i < m; ++i) ritz += es.eigenvectors()(i, 0) * basis[static_cast<size_t>(i)];
            ritz.normalize();
            break;
        }
        beta.push_back(b_it);
        prev = q;
        prev_beta = b_it;
        q = w / b_it;
    }
    return package_ci(dets, ham, e0, ritz, e1);
}

CIResult full_ci_ground(const SpinHamiltonian& ham, int N, int dense_threshold) {
    return ci_ground(ham, all_determinants(ham.d, N), dense_threshold);
}

CIResult full_ci_ground(const IntegralTables& tables, int N, int d, int dense_threshold) {
    if (d != 2 * tables.K) {
        throw std::invalid_argument("spatial tables require d = 2K");
    }
    return full_ci_ground(SpinHamiltonian::from_spatial(tables), N, dense_threshold);
}

std::vector<Determinant> sector_determinants(int K, int n_up, int n_down) {
    if (n_up < 0 || n_down < 0 || n_up > K || n_down > K) {
        throw std::invalid_argument("invalid sector occupation");
    }
    auto ups = all_determinants(K, n_up);
    auto downs = all_determinants(K, n_down);
    std::vector<Determinant> out;
    out.reserve(ups.size() * downs.size());
    for (const auto& u : ups) {
        for (const auto& dn : downs) {
            std::uint32_t mask = 0;
            for (int p : u.orbitals()) mask |= 1u << (2 * (p - 1));
            for (int p : dn.orbitals()) mask |= 1u << (2 * (p - 1) + 1);
            out.push_back(Determinant{mask});
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace pinscf
