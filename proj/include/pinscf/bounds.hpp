// bounds.hpp
// Pinning diagnostics: spectrum extremes, the quasipinning-versus-correlation
// report, coupling scans, and construction of exactly pinned test Hamiltonians.
#pragma once

#include <optional>

#include "pinscf/solver.hpp"

namespace pinscf {

struct SpectrumSummary {
    double E0 = 0.0;
    double E_ex_minus = 0.0;  // lowest excitation energy level
    double E_ex_plus = 0.0;   // highest eigenvalue
    bool degenerate = false;  // E1 - E0 <= 1e-9
};

// Full determinant space of the abstract Hamiltonian.
SpectrumSummary spectrum_summary(const SpinHamiltonian& ham, int N);
// S_z sector (n_up = N - N/2, n_down = N/2) of spin-embedded tables; the
// sector holds one member of every degenerate S_z multiplet.
SpectrumSummary spectrum_summary(const IntegralTables& tables, int N);

// External reference energies for correlation bookkeeping (hartree).
struct CorrelationRefs {
    double hf_literature = 0.0;
    double exact_literature = 0.0;
    double single_determinant = 0.0;
};

struct CorrelationRecovery {
    std::string label;     // which HF/exact reference pair
    double e_hf_ref = 0.0;
    double e_exact_ref = 0.0;
    std::optional<double> percent;  // undefined when the reference gap vanishes
};

struct BoundReport {
    double coupling = 1.0;  // two-electron scale factor (1 outside scans)
    double E0 = 0.0;        // exact (full CI) ground energy
    double E_HF = 0.0;      // best single-determinant energy in the basis
    double E_D = 0.0;       // pinned-ansatz optimum
    double delta_E = 0.0;   // E_D - E0 >= 0
    double E_corr = 0.0;    // E_HF - E0 >= 0
    double D_value = 0.0;   // facet functional of the top-6 exact NON
    double S_value = 0.0;   // l1 distance of the exact NON to the HF point
    std::optional<double> ratio_energy;    // delta_E / E_corr
    std::optional<double> ratio_geometry;  // D / S
    std::optional<double> K_empirical;     // ratio_energy / ratio_geometry
    OccupationVector non;   // full sorted exact NON
    // Always holds the basis-internal variant; literature variants join it
    // when refs are supplied.
    std::vector<CorrelationRecovery> recoveries;
    std::string recovery_note;

    std::string json() const;
};

// FCI + HF pre-optimization + pinned MCSCF on the same tables.  Throws on a
// degenerate ground state (sector gap <= 1e-9).
BoundReport bound_report(const IntegralTables& tables, const SolverConfig& config,
                         const std::optional<CorrelationRefs>& refs = std::nullopt);

// bound_report over copies of `tables` with the two-electron tensor scaled by
// each coupling; one row per coupling.
std::vector<BoundReport> quasipinning_scan(const IntegralTables& tables,
                                           const std::vector<double>& couplings,
                                           const SolverConfig& config);

std::string bound_csv_header();  // coupling,E0,E_HF,E_D,delta_E,E_corr,D,S
std::string bound_csv_row(const BoundReport& report);

struct PinnedTables {
    IntegralTables tables;       // K = 3 spatial orbitals
    BDCoefficients coefficients; // ground-state amplitudes (assignment A form)
    double energy = 0.0;         // sector ground energy
    double gap = 0.0;            // first sector excitation gap
};

// Random K=3 tables whose sector ground state is exactly the pinned
// three-determinant state: solved linearly from the eigenvector equations,
// then polished so every other sector eigenvalue clears energy + gap.
// Deterministic for fixed seed; internally retries derived seeds.
PinnedTables make_pinned_tables(unsigned seed);

}  // namespace pinscf
