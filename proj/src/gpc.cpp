// gpc.cpp
#include "pinscf/gpc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

namespace pinscf {

double OccupationVector::sum() const {
    return std::accumulate(values.begin(), values.end(), 0.0);
}

bool OccupationVector::is_ordered(double tol) const {
    for (size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[i - 1] + tol) return false;
    }
    return true;
}

bool OccupationVector::within_pauli_bounds(double tol) const {
    return std::all_of(values.begin(), values.end(),
                       [tol](double v) { return v >= -tol && v <= 1.0 + tol; });
}

void OccupationVector::validate_ordered(double tol) const {
    if (!within_pauli_bounds(tol)) {
        throw std::invalid_argument("occupation outside [0,1]");
    }
    if (!is_ordered(tol)) {
        throw std::invalid_argument("occupations not decreasingly ordered");
    }
}

void OccupationVector::validate_normalized(int N, double tol) const {
    if (std::abs(sum() - N) > tol) {
        throw std::invalid_argument("occupations sum to " + std::to_string(sum()) +
                                    ", expected " + std::to_string(N));
    }
}

OccupationVector OccupationVector::sorted_desc() const {
    OccupationVector out(*this);
    std::sort(out.values.begin(), out.values.end(), std::greater<double>());
    return out;
}

namespace {

void require_dim6(const OccupationVector& lam, const char* what) {
    if (lam.dimension() != 6) {
        throw std::invalid_argument(std::string(what) + " requires a 6-component vector, got " +
                                    std::to_string(lam.dimension()));
    }
}

}  // namespace

std::array<double, 3> bd_equality_residuals(const OccupationVector& lam) {
    require_dim6(lam, "bd_equality_residuals");
    return {lam[0] + lam[5] - 1.0, lam[1] + lam[4] - 1.0, lam[2] + lam[3] - 1.0};
}

double bd_inequality(const OccupationVector& lam) {
    require_dim6(lam, "bd_inequality");
    return 2.0 - (lam[0] + lam[1] + lam[3]);
}

double evaluate_constraint(const LinearConstraint& c, const OccupationVector& lam) {
    if (static_cast<int>(c.kappas.size()) != lam.dimension()) {
        throw std::invalid_argument("constraint dimension mismatch");
    }
    double v = c.kappa0;
    for (int i = 0; i < lam.dimension(); ++i) v += c.kappas[static_cast<size_t>(i)] * lam[i];
    return v;
}

double distance_to_hf(const OccupationVector& lam, int N) {
    if (N < 0 || N > lam.dimension()) {
        throw std::invalid_argument("invalid particle number for HF distance");
    }
    double s = 0.0;
    for (int i = 0; i < lam.dimension(); ++i) {
        s += (i < N) ? std::abs(1.0 - lam[i]) : std::abs(lam[i]);
    }
    return s;
}

double facet_distance(const OccupationVector& lam) {
    require_dim6(lam, "facet_distance");
    constexpr double tol = 1e-9;
    lam.validate_ordered(tol);
    auto eq = bd_equality_residuals(lam);
    for (size_t i = 0; i < 3; ++i) {
        if (std::abs(eq[i]) > tol) {
            throw std::invalid_argument("facet_distance: equality lam" + std::to_string(i + 1) +
                                        "+lam" + std::to_string(6 - i) + "=1 violated by " +
                                        std::to_string(eq[i]));
        }
    }
    double D = bd_inequality(lam);
    if (D < -tol) {
        throw std::invalid_argument("facet_distance: D(lam) negative (" + std::to_string(D) + ")");
    }
    return 2.0 * std::max(D, 0.0);
}

LinearConstraint bd_facet_constraint() {
    return {2.0, {-1.0, -1.0, 0.0, -1.0, 0.0, 0.0}, "2 - n1 - n2 - n4"};
}

std::array<LinearConstraint, 3> bd_equality_constraints() {
    return {LinearConstraint{1.0, {-1.0, 0.0, 0.0, 0.0, 0.0, -1.0}, "1 - n1 - n6"},
            LinearConstraint{1.0, {0.0, -1.0, 0.0, 0.0, -1.0, 0.0}, "1 - n2 - n5"},
            LinearConstraint{1.0, {0.0, 0.0, -1.0, -1.0, 0.0, 0.0}, "1 - n3 - n4"}};
}

std::vector<PauliViolation> pauli_violations(const OccupationVector& lam, double tol) {
    std::vector<PauliViolation> out;
    for (int i = 0; i < lam.dimension(); ++i) {
        double v = lam[i];
        if (v < -tol) {
            out.push_back({i + 1, -v});
        } else if (v > 1.0 + tol) {
            out.push_back({i + 1, v - 1.0});
        }
    }
    return out;
}

ConstraintReport analyze_occupations(const OccupationVector& lam, int N) {
    ConstraintReport rep;
    rep.pauli_violations = pauli_violations(lam);
    rep.hf_distance = distance_to_hf(lam, N);
    if (lam.dimension() != 6) {
        rep.message = "Pauli-only analysis (dimension != 6)";
        rep.representable = rep.pauli_violations.empty() && lam.is_ordered();
        return rep;
    }
    auto eq = bd_equality_residuals(lam);
    rep.bd_equality_residuals = eq;
    double D = bd_inequality(lam);
    rep.bd_inequality_value = D;
    constexpr double tol = 1e-9;
    rep.representable = rep.pauli_violations.empty() && lam.is_ordered(tol);
    std::string why;
    if (!lam.is_ordered(tol)) why = "not decreasingly ordered";
    for (size_t i = 0; i < 3 && why.empty(); ++i) {
        if (std::abs(eq[i]) > tol) {
            why = "equality lam" + std::to_string(i + 1) + "+lam" + std::to_string(6 - i) +
                  "=1 violated by " + std::to_string(eq[i]);
        }
    }
    if (why.empty() && D < -tol) why = "D(lam) = " + std::to_string(D) + " < 0";
    if (why.empty() && !rep.pauli_violations.empty()) why = "Pauli bound violated";
    if (!why.empty()) {
        rep.representable = false;
        rep.message = "not (3,6)-representable: " + why;
    } else {
        rep.facet_distance = facet_distance(lam);
        rep.message = "inside the (3,6) polytope";
    }
    return rep;
}

std::string ConstraintReport::json() const {
    nlohmann::json j;
    auto viols = nlohmann::json::array();
    for (const auto& v : pauli_violations) {
        viols.push_back({{"index", v.index}, {"excess", v.excess}});
    }
    j["pauli_violations"] = viols;
    // Stable schema: absent diagnostics serialize as null, never as missing keys.
    j["bd_equality_residuals"] =
        bd_equality_residuals ? nlohmann::json(*bd_equality_residuals) : nlohmann::json();
    j["bd_inequality_value"] =
        bd_inequality_value ? nlohmann::json(*bd_inequality_value) : nlohmann::json();
    j["hf_distance"] = hf_distance;
    j["facet_distance"] = facet_distance ? nlohmann::json(*facet_distance) : nlohmann::json();
    j["representable"] = representable;
    j["message"] = message;
    return j.dump(2);
}

}  // namespace pinscf
