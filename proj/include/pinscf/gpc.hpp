// gpc.hpp
// Pauli and generalized Pauli constraints for natural occupation numbers:
// the Borland-Dennis (3,6) equalities and inequality, the l1 distance to the
// Hartree-Fock point, and the l1 distance to the facet {D = 0}.
#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace pinscf {

// Natural occupation numbers.  Ordering and normalization are contextual:
// callers that require a decreasingly ordered vector validate on use, since
// some producers (e.g. the closed-form Borland-Dennis occupancies) emit
// label-order occupancies that are sorted only for self-consistent states.
struct OccupationVector {
    std::vector<double> values;

    OccupationVector() = default;
    explicit OccupationVector(std::vector<double> v) : values(std::move(v)) {}

    int dimension() const { return static_cast<int>(values.size()); }
    double sum() const;
    bool is_ordered(double tol = 1e-10) const;
    bool within_pauli_bounds(double tol = 1e-12) const;

    // Throws if any entry leaves [-tol, 1+tol] or ordering is violated.
    void validate_ordered(double tol = 1e-10) const;
    // Throws unless entries sum to N within tol.
    void validate_normalized(int N, double tol = 1e-10) const;

    OccupationVector sorted_desc() const;
    double operator[](int i) const { return values[static_cast<size_t>(i)]; }
};

struct LinearConstraint {
    double kappa0 = 0.0;
    std::vector<double> kappas;  // kappas[i] weights orbital i+1
    std::string name;
};

struct PauliViolation {
    int index = 0;      // 1-based entry index
    double excess = 0;  // amount beyond [0,1]
};

struct ConstraintReport {
    std::vector<PauliViolation> pauli_violations;
    std::optional<std::array<double, 3>> bd_equality_residuals;  // d == 6 only
    std::optional<double> bd_inequality_value;
    double hf_distance = 0.0;
    std::optional<double> facet_distance;  // absent when not (3,6)-representable
    bool representable = true;             // (3,6) membership, d == 6 only
    std::string message;

    std::string json() const;
};

// (lam1+lam6-1, lam2+lam5-1, lam3+lam4-1); requires d = 6.
std::array<double, 3> bd_equality_residuals(const OccupationVector& lam);

// D(lam) = 2 - (lam1 + lam2 + lam4); requires d = 6.
double bd_inequality(const OccupationVector& lam);

// kappa0 + sum_i kappa_i lam_i.
double evaluate_constraint(const LinearConstraint& c, const OccupationVector& lam);

// l1 distance to the Hartree-Fock point (1,..,1,0,..,0) with N ones.
double distance_to_hf(const OccupationVector& lam, int N);

// l1 distance from lam to the facet F_D = {D = 0} of the (3,6) polytope.
// Equals 2*D(lam) for every polytope member: for any facet point mu the
// equality pairing |mu_j - lam_j| = |mu_i - lam_i| (j = 7-i) doubles the
// per-coordinate cost, and raising mu_1 alone attains the bound because the
// ordering guarantees lam_2 + lam_4 >= 1.  Throws when lam violates the
// polytope constraints, naming the violated one.
double facet_distance(const OccupationVector& lam);

// Built-in (3,6) catalog: the three equality operators as two one-sided
// constraints would be redundant; they are exposed as residual form above.
LinearConstraint bd_facet_constraint();                  // 2 - n1 - n2 - n4
std::array<LinearConstraint, 3> bd_equality_constraints();  // 1 - n1 - n6, ...

std::vector<PauliViolation> pauli_violations(const OccupationVector& lam, double tol = 1e-12);

// Aggregate report; never throws on non-representable vectors (facet distance
// is omitted and the violated constraint is named instead).
ConstraintReport analyze_occupations(const OccupationVector& lam, int N);

}  // namespace pinscf
