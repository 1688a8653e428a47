// Independent reference implementations used by the test suite: direct
// second-quantization Hamiltonian assembly, brute-force 1-RDM contraction,
// grid search for the facet distance, and random-instance generators.
#pragma once

#include <random>

#include "pinscf/bounds.hpp"

namespace pinscf {
namespace oracles {

// All n-particle determinants over d orbitals by direct recursion (independent
// of all_determinants).
std::vector<Determinant> enumerate_determinants(int d, int n);

// <det_i|H|det_j> assembled by explicit operator application on bit patterns:
// H = sum h_pq a+_p a_q + 1/2 sum (pq|rs) a+_p a+_r a_s a_q (chemists').
Eigen::MatrixXd hamiltonian_by_operators(const SpinHamiltonian& ham,
                                         const std::vector<Determinant>& dets);

// rho(p, q) = <a+_q a_p> by explicit operator application.
Eigen::MatrixXcd one_rdm_by_operators(const Wavefunction& psi);

// l1 distance to the facet {D = 0} by nested grid search over the facet's
// two-parameter description; accurate to roughly `resolution`.
double facet_distance_by_grid(const OccupationVector& lam, double* resolution = nullptr);

// Central-difference derivative of f along coordinate i.
double central_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                          const Eigen::VectorXd& x, int i, double h);

// Random normalized wavefunction over all C(d, n) determinants.
Wavefunction random_wavefunction(std::mt19937_64& rng, int d, int n);

// Random hermitian-symmetric spatial tables (8-fold g symmetry; not
// necessarily physical).
IntegralTables random_tables(std::mt19937_64& rng, int K, double one_body_scale,
                             double two_body_scale);

}  // namespace oracles
}  // namespace pinscf
