// solver.hpp
// Variational machinery: exponent optimization, Hartree-Fock preoptimization,
// and the alternating coefficient/orbital MCSCF loop.
#pragma once

#include <functional>
#include <optional>

#include "pinscf/ansatz.hpp"

namespace pinscf {

struct SolverConfig {
    int max_iterations = 200;
    double gradient_tolerance = 1e-8;
    double energy_tolerance = 1e-10;
    double finite_difference_step = 1e-5;
    unsigned seed = 12345;
    int multistart = 5;  // random restarts per spin assignment
    std::optional<SpinAssignment> assignment;  // nullopt = try both, keep lower
    int natural_start_max_dim = 1500;  // sector size cap for the warm start

    void validate() const;  // positive tolerances and counts
};

struct ExponentResult {
    double a = 0.0;  // self-consistent expansion exponent
    double b = 0.0;  // hydrogenic exponent
    double energy = 0.0;
    int evaluations = 0;
};

// Minimize the single-determinant energy of the N-electron ground configuration
// over (a, b) by Nelder-Mead.  M >= 1 expansion functions.
ExponentResult optimize_exponents(int M, double Z, const SolverConfig& config, int N = 3);

struct HFResult {
    double energy = 0.0;
    OrbitalRotation rotation;  // from the input basis to the HF-optimal one
    IntegralTables tables;     // rotated tables
    int iterations = 0;
    double gradient_norm = 0.0;
};

// Optimize a single closed-shell-plus-one determinant (c = (1,0,0), assignment
// A) over real orbital rotations.
HFResult hf_preoptimize(const IntegralTables& tables, const SolverConfig& config);

struct SolveResult {
    double energy = 0.0;
    BDCoefficients coefficients;
    SpinAssignment assignment = SpinAssignment::A;
    OrbitalRotation rotation;       // accumulated, from the input basis
    IntegralTables tables;          // input tables rotated by `rotation`
    OccupationVector occupations;   // natural occupations of the converged state
    double hf_energy = 0.0;         // best single-determinant energy found
    double gradient_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> energy_trace;  // energy after every accepted step
};

// Full pinned-ansatz optimization.  Runs both spin assignments and multistart
// seeds, keeps the lowest energy.  K = tables.K >= 3.
SolveResult mcscf_solve(const IntegralTables& tables, const SolverConfig& config);

// Packed real parameter vector: [Re a, Im a, Re b, Im b, Re g, Im g] followed
// by the strict lower triangle (p > q, lexicographic by (p, q)) of a real
// antisymmetric generator applied on top of `tables`.
int packed_dimension(int K);
double packed_energy(const Eigen::VectorXd& x, SpinAssignment sa, const IntegralTables& tables);
// Analytic gradient of packed_energy; matches central differences.
Eigen::VectorXd packed_gradient(const Eigen::VectorXd& x, SpinAssignment sa,
                                const IntegralTables& tables);

}  // namespace pinscf
