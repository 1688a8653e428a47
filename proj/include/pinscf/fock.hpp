// fock.hpp
// Slater-determinant algebra: 1-RDM contraction, natural orbitals,
// self-consistent expansion, number-operator selection rules, Slater-Condon
// matrix elements, and full CI.
//
// Spin-orbital convention: spatial orbital p (1-based) with spin up maps to
// spin-orbital index 2p-1, spin down to 2p.
#pragma once

#include <optional>

#include <Eigen/Dense>

#include "pinscf/gpc.hpp"
#include "pinscf/radial.hpp"
#include "pinscf/wavefunction.hpp"

namespace pinscf {

struct OneRDM {
    Eigen::MatrixXcd rho;  // rho(p,q) = <a_q^dagger a_p>, diagonal = occupancies

    explicit OneRDM(Eigen::MatrixXcd m) : rho(std::move(m)) { validate(); }
    int dimension() const { return static_cast<int>(rho.rows()); }
    void validate(double herm_tol = 1e-12) const;  // hermiticity only; spectrum checked by consumers
};

struct NumberOperatorCombo {
    double constant = 0.0;
    std::vector<double> weights;  // weights[i] applies to orbital i+1

    // Eigenvalue of the combo on a determinant.
    double eigenvalue(const Determinant& det) const;
    bool integer_valued(double tol = 1e-12) const;
};

OneRDM one_rdm(const Wavefunction& psi);

struct NaturalBasis {
    OccupationVector occupations;  // decreasing
    Eigen::MatrixXcd orbitals;     // column j = natural orbital j in the original basis
};

// Eigenvalues sorted decreasingly; deterministic eigenvector phases (largest
// magnitude component real positive, ties by lowest index); degenerate blocks
// canonicalized by projecting coordinate axes onto the block span.
NaturalBasis natural_occupations(const OneRDM& rdm);

// Re-express psi over determinants of its own natural spin orbitals.
Wavefunction transform_to_natural_basis(const Wavefunction& psi);

// All determinants with eigenvalue exactly zero; exact integer arithmetic when
// constant and weights are integers.
std::vector<Determinant> selection_rule_configs(const NumberOperatorCombo& op, int N, int d);

Wavefunction apply_number_combo(const NumberOperatorCombo& op, const Wavefunction& psi);

// Borland-Dennis operators with canonical minimal-integer coefficients.
NumberOperatorCombo bd_facet_operator();                      // 2 - n1 - n2 - n4
std::array<NumberOperatorCombo, 3> bd_equality_operators();   // 1 - n1 - n6, ...

// One- plus two-body Hamiltonian over d spin orbitals with dense coefficient
// arrays.  Either built from spatial tables via the parity embedding or from
// explicit spin-orbital arrays (abstract settings without spin structure).
struct SpinHamiltonian {
    int d = 0;
    Eigen::MatrixXd h;      // d x d
    std::vector<double> g;  // d^4 chemists' (ij|kl)

    static SpinHamiltonian from_spatial(const IntegralTables& tables);
    static SpinHamiltonian from_arrays(Eigen::MatrixXd h_so, std::vector<double> g_so);

    double g4(int i, int j, int k, int l) const {
        return g[static_cast<size_t>(((i * d + j) * d + k)) * d + l];
    }
};

// <det_a|H|det_b> with maximum-coincidence sign; zero beyond double excitations.
double slater_condon(const Determinant& a, const Determinant& b, const SpinHamiltonian& ham);
// Spatial-tables overload (d = 2K, parity embedding).
double slater_condon(const Determinant& a, const Determinant& b, const IntegralTables& tables);

Eigen::MatrixXd hamiltonian_matrix(const SpinHamiltonian& ham, const std::vector<Determinant>& dets);

struct CIResult {
    double energy = 0.0;
    Wavefunction ground;
    double residual = 0.0;
    double gap = 0.0;  // E1 - E0 within the diagonalized space (0 if dim == 1)
};

// Lowest eigenpair over the given determinant list; dense below
// dense_threshold, Lanczos with full reorthogonalization above.
CIResult ci_ground(const SpinHamiltonian& ham, const std::vector<Determinant>& dets,
                   int dense_threshold = 2000);

// Full CI over all C(d, N) determinants.
CIResult full_ci_ground(const SpinHamiltonian& ham, int N, int dense_threshold = 2000);
// Spatial overload per the module contract: d must equal 2K.
CIResult full_ci_ground(const IntegralTables& tables, int N, int d, int dense_threshold = 2000);

// Determinants of the (n_up, n_down) S_z sector of a spin-embedded basis with
// K spatial orbitals.
std::vector<Determinant> sector_determinants(int K, int n_up, int n_down);

}  // namespace pinscf
