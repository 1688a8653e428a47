// ansatz.hpp
// Three-determinant pinned ansatz: coefficient triple, the two spin
// assignments, orbital rotations, and the energy functional.
#pragma once

#include <array>

#include <Eigen/Dense>

#include "pinscf/fock.hpp"

namespace pinscf {

struct BDCoefficients {
    cplx alpha{1.0, 0.0};
    cplx beta{0.0, 0.0};
    cplx gamma{0.0, 0.0};

    double norm_sq() const { return std::norm(alpha) + std::norm(beta) + std::norm(gamma); }
    BDCoefficients normalized() const;
    void validate(double tol = 1e-12) const;  // throws unless |c| = 1 within tol
};

enum class SpinAssignment { A, B };

SpinAssignment parse_assignment(const std::string& s);  // accepts "A" or "B" only
std::string to_string(SpinAssignment sa);

// Spin label of abstract level i (1..6) under the assignment, as the canonical
// spin-orbital index 2p-1 (spatial p, up) or 2p (down).
int assignment_spin_orbital(SpinAssignment sa, int level);

// The three determinants (in canonical spin-orbital labels) and relative signs
// picked up when reordering each product into ascending canonical order.
std::array<Determinant, 3> assignment_determinants(SpinAssignment sa);
std::array<double, 3> assignment_signs(SpinAssignment sa);

// alpha|1,2,3> + beta|1,4,5> + gamma|2,4,6> in abstract levels, returned over
// canonical spin orbitals of d = 6.
Wavefunction bd_state(const BDCoefficients& c, SpinAssignment sa);

// |beta| >= |gamma| and |alpha|^2 >= |beta|^2 + |gamma|^2 (tolerance eps);
// under these the closed-form occupations are decreasing and the facet
// saturates exactly.
bool check_selfconsistency(const BDCoefficients& c, double eps = 1e-12);

// (|a|^2+|b|^2, |a|^2+|g|^2, |a|^2, |b|^2+|g|^2, |b|^2, |g|^2) for normalized c.
OccupationVector bd_non_closed_form(const BDCoefficients& c);

struct OrbitalRotation {
    Eigen::MatrixXcd generator;  // antihermitian, K x K

    OrbitalRotation() = default;
    explicit OrbitalRotation(Eigen::MatrixXcd gen);
    int dimension() const { return static_cast<int>(generator.rows()); }
    Eigen::MatrixXcd unitary() const;  // exp(generator), unitary to 1e-10

    static OrbitalRotation identity(int K);
    // Principal logarithm of a unitary; column phases fixed so exp(log U) = U.
    static OrbitalRotation from_unitary(const Eigen::MatrixXcd& U);
};

// Tables in the rotated basis phi'_q = sum_p U(p,q) phi_p with U = exp(kappa).
// Requires exp(kappa) real within 1e-10 since the tables stay real.
IntegralTables rotate_orbitals(const IntegralTables& tables, const OrbitalRotation& rotation);
// Same congruence for an explicit real orthogonal U (orthogonality checked to 1e-8).
IntegralTables rotate_orbitals(const IntegralTables& tables, const Eigen::MatrixXd& U);

// <Psi|H|Psi> for the pinned state over the first three orbitals of tables.
double ansatz_energy(const BDCoefficients& c, SpinAssignment sa, const IntegralTables& tables);

// 3x3 hermitian matrix M with energy = c^dag M c / c^dag c over (alpha, beta, gamma).
Eigen::Matrix3cd csf_matrix(SpinAssignment sa, const IntegralTables& tables);

}  // namespace pinscf
