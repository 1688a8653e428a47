#include "oracles.hpp"

#include <cmath>
#include <map>

namespace pinscf {
namespace oracles {

namespace {

void enumerate_rec(int d, int n, int next, std::uint32_t mask, std::vector<Determinant>& out) {
    if (n == 0) {
        out.push_back(Determinant{mask});
        return;
    }
    for (int orb = next; orb <= d - n + 1; ++orb)
        enumerate_rec(d, n - 1, orb + 1, mask | (1u << (orb - 1)), out);
}

// a_q |mask> with fermionic sign; returns false when annihilated.  Orbitals
// are 0-based here.
bool annihilate(std::uint32_t& mask, int q, int& sign) {
    std::uint32_t bit = 1u << q;
    if (!(mask & bit)) return false;
    if (std::popcount(mask & (bit - 1u)) % 2 == 1) sign = -sign;
    mask &= ~bit;
    return true;
}

bool create(std::uint32_t& mask, int p, int& sign) {
    std::uint32_t bit = 1u << p;
    if (mask & bit) return false;
    if (std::popcount(mask & (bit - 1u)) % 2 == 1) sign = -sign;
    mask |= bit;
    return true;
}

using Column = std::map<std::uint32_t, double>;

// H applied to a single determinant, accumulated per resulting bit pattern.
Column apply_hamiltonian(const SpinHamiltonian& ham, std::uint32_t ket) {
    Column out;
    const int d = ham.d;
    for (int q = 0; q < d; ++q)
        for (int p = 0; p < d; ++p) {
            if (ham.h(p, q) == 0.0) continue;
            std::uint32_t m = ket;
            int sign = 1;
            if (!annihilate(m, q, sign)) continue;
            if (!create(m, p, sign)) continue;
            out[m] += sign * ham.h(p, q);
        }
    for (int q = 0; q < d; ++q)
        for (int s = 0; s < d; ++s)
            for (int r = 0; r < d; ++r)
                for (int p = 0; p < d; ++p) {
                    double v = ham.g4(p, q, r, s);
                    if (v == 0.0) continue;
                    std::uint32_t m = ket;
                    int sign = 1;
                    if (!annihilate(m, q, sign)) continue;
                    if (!annihilate(m, s, sign)) continue;
                    if (!create(m, r, sign)) continue;
                    if (!create(m, p, sign)) continue;
                    out[m] += 0.5 * sign * v;
                }
    return out;
}

}  // namespace

std::vector<Determinant> enumerate_determinants(int d, int n) {
    std::vector<Determinant> out;
    enumerate_rec(d, n, 1, 0u, out);
    return out;
}

Eigen::MatrixXd hamiltonian_by_operators(const SpinHamiltonian& ham,
                                         const std::vector<Determinant>& dets) {
    const int m = static_cast<int>(dets.size());
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m, m);
    for (int j = 0; j < m; ++j) {
        Column col = apply_hamiltonian(ham, dets[static_cast<size_t>(j)].mask);
        for (int i = 0; i < m; ++i) {
            auto it = col.find(dets[static_cast<size_t>(i)].mask);
            if (it != col.end()) H(i, j) = it->second;
        }
    }
    return H;
}

Eigen::MatrixXcd one_rdm_by_operators(const Wavefunction& psi) {
    const int d = psi.d;
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d, d);
    for (int p = 0; p < d; ++p)
        for (int q = 0; q < d; ++q) {
            cplx acc = 0.0;
            // <psi| a+_q a_p |psi>
            for (const auto& [det, amp] : psi.amplitudes) {
                std::uint32_t m = det.mask;
                int sign = 1;
                if (!annihilate(m, p, sign)) continue;
                if (!create(m, q, sign)) continue;
                acc += std::conj(psi.amplitude(Determinant{m})) * amp * static_cast<double>(sign);
            }
            rho(p, q) = acc;
        }
    return rho;
}

double facet_distance_by_grid(const OccupationVector& lam, double* resolution) {
    // Facet points: mu1 >= mu2 >= mu3 >= mu4 >= mu5 >= mu6 >= 0 with
    // mu6 = 1-mu1, mu5 = 1-mu2, mu3 = mu1+mu2-1, mu4 = 2-mu1-mu2.
    auto l1 = [&](double m1, double m2) {
        double m3 = m1 + m2 - 1.0, m4 = 2.0 - m1 - m2, m5 = 1.0 - m2, m6 = 1.0 - m1;
        return std::abs(lam[0] - m1) + std::abs(lam[1] - m2) + std::abs(lam[2] - m3) +
               std::abs(lam[3] - m4) + std::abs(lam[4] - m5) + std::abs(lam[5] - m6);
    };
    auto feasible = [](double m1, double m2) {
        double m3 = m1 + m2 - 1.0, m4 = 2.0 - m1 - m2, m5 = 1.0 - m2, m6 = 1.0 - m1;
        return m1 >= m2 && m2 >= m3 && m3 >= m4 && m4 >= m5 && m5 >= m6 && m6 >= 0.0;
    };
    double lo1 = 0.5, hi1 = 1.0, lo2 = 0.5, hi2 = 1.0;
    double best = 1e300, b1 = 0.75, b2 = 0.75, step = 0.0;
    for (int level = 0; level < 4; ++level) {
        const int n = 80;
        step = (hi1 - lo1) / n;
        for (int i = 0; i <= n; ++i)
            for (int j = 0; j <= n; ++j) {
                double m1 = lo1 + (hi1 - lo1) * i / n, m2 = lo2 + (hi2 - lo2) * j / n;
                if (!feasible(m1, m2)) continue;
                double v = l1(m1, m2);
                if (v < best) {
                    best = v;
                    b1 = m1;
                    b2 = m2;
                }
            }
        double w1 = (hi1 - lo1) * 2.0 / n, w2 = (hi2 - lo2) * 2.0 / n;
        lo1 = std::max(0.5, b1 - w1);
        hi1 = std::min(1.0, b1 + w1);
        lo2 = std::max(0.5, b2 - w2);
        hi2 = std::min(1.0, b2 + w2);
    }
    if (resolution) *resolution = 8.0 * step;
    return best;
}

double central_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                          const Eigen::VectorXd& x, int i, double h) {
    Eigen::VectorXd xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    return (f(xp) - f(xm)) / (2.0 * h);
}

Wavefunction random_wavefunction(std::mt19937_64& rng, int d, int n) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Wavefunction psi(d, n);
    for (const Determinant& det : enumerate_determinants(d, n))
        psi.set(det, cplx(nd(rng), nd(rng)));
    psi.normalize();
    return psi;
}

IntegralTables random_tables(std::mt19937_64& rng, int K, double one_body_scale,
                             double two_body_scale) {
    std::normal_distribution<double> nd(0.0, 1.0);
    IntegralTables T(K, 0.0);
    for (int p = 0; p < K; ++p)
        for (int q = p; q < K; ++q) {
            double v = one_body_scale * nd(rng);
            T.h(p, q) = v;
            T.h(q, p) = v;
        }
    for (int p = 0; p < K; ++p)
        for (int q = p; q < K; ++q)
            for (int r = 0; r < K; ++r)
                for (int s = r; s < K; ++s) {
                    if (p * K + q > r * K + s) continue;
                    T.set_g(p, q, r, s, two_body_scale * nd(rng));
                }
    return T;
}

}  // namespace oracles
}  // namespace pinscf
