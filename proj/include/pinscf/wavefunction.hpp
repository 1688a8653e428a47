// wavefunction.hpp
// Finite superpositions of Slater determinants with complex amplitudes.
// Amplitudes always refer to index-sorted determinants.
#pragma once

#include <complex>
#include <map>

#include "pinscf/determinant.hpp"

namespace pinscf {

using cplx = std::complex<double>;

struct Wavefunction {
    int d = 0;  // spin-orbital count
    int n = 0;  // particle number
    std::map<Determinant, cplx> amplitudes;

    Wavefunction() = default;
    Wavefunction(int d_, int n_) : d(d_), n(n_) {
        if (d_ < 1 || d_ > kMaxOrbitals || n_ < 0 || n_ > d_)
            throw std::invalid_argument("invalid wavefunction dimensions");
    }

    void set(const Determinant& det, cplx amp) {
        if (det.count() != n)
            throw std::invalid_argument("determinant particle number mismatch");
        if (det.mask >> d)
            throw std::invalid_argument("determinant uses orbitals beyond d");
        amplitudes[det] = amp;
    }

    cplx amplitude(const Determinant& det) const {
        auto it = amplitudes.find(det);
        return it == amplitudes.end() ? cplx(0.0) : it->second;
    }

    double norm_sq() const {
        double s = 0.0;
        for (const auto& [det, amp] : amplitudes) s += std::norm(amp);
        return s;
    }

    double norm() const { return std::sqrt(norm_sq()); }

    Wavefunction& normalize() {
        double nn = norm();
        if (nn <= 0.0) throw std::runtime_error("cannot normalize zero wavefunction");
        for (auto& [det, amp] : amplitudes) amp /= nn;
        return *this;
    }

    bool is_normalized(double tol = 1e-12) const { return std::abs(norm_sq() - 1.0) <= tol; }

    // Drop amplitudes with |c| <= eps.
    Wavefunction& prune(double eps = 0.0) {
        for (auto it = amplitudes.begin(); it != amplitudes.end();)
            it = (std::abs(it->second) <= eps) ? amplitudes.erase(it) : std::next(it);
        return *this;
    }

    std::string json() const;
    static Wavefunction from_json(const std::string& text);
};

inline cplx inner(const Wavefunction& a, const Wavefunction& b) {
    cplx s = 0.0;
    for (const auto& [det, amp] : a.amplitudes) s += std::conj(amp) * b.amplitude(det);
    return s;
}

}  // namespace pinscf
