// radial.hpp
// s-type radial orbitals as finite sums c * r^k * exp(-zeta r), the
// Shull-Loewdin and hydrogen-like families, closed-form one- and two-electron
// integrals, Gram-Schmidt basis construction, and integral tables.
#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace pinscf {

struct RadialTerm {
    double coeff = 0.0;
    int power = 0;      // k >= 0
    double zeta = 1.0;  // > 0, bohr^-1
};

// f(r) = sum_t coeff * r^power * exp(-zeta r); a full 3D s-type orbital with
// norm 4*pi * int f^2 r^2 dr.
struct RadialFunction {
    std::vector<RadialTerm> terms;
    std::string label;

    // Merge terms with identical (power, zeta) and drop exact zeros.
    RadialFunction consolidated() const;
    double evaluate(double r) const;
    double min_zeta() const;
};

RadialFunction scale(double c, const RadialFunction& f);
RadialFunction add(const RadialFunction& f, const RadialFunction& g);

// Shull-Loewdin orbital delta_n(a, r) ~ L^2_{n-1}(2 a r) exp(-a r), unit norm.
// The family is orthonormal for fixed a.  Requires 1 <= n <= 12.
RadialFunction shull_lowdin(int n, double a);

// chi_1(b, r) ~ r exp(-b r/2); chi_2(b, r) ~ r^2 exp(-b r/3); unit norm.
RadialFunction hydrogenic_chi(int n, double b);

// 4*pi int f g r^2 dr (closed form throughout).
double overlap(const RadialFunction& f, const RadialFunction& g);
// <f| -1/2 nabla^2 |g> = 2*pi int (r f)' (r g)' dr for s-type functions.
double kinetic(const RadialFunction& f, const RadialFunction& g);
// -Z * 4*pi int f g r dr.
double nuclear_attraction(const RadialFunction& f, const RadialFunction& g, double Z);
// Chemists' (f1 f2 | f3 f4) = (4*pi)^2 intint f1 f2(r1) f3 f4(r2) r1^2 r2^2 / r> dr1 dr2.
double coulomb_repulsion(const RadialFunction& f1, const RadialFunction& f2,
                         const RadialFunction& f3, const RadialFunction& f4);

// delta_1..delta_M followed by chi_1, chi_2, Gram-Schmidt orthonormalized in
// that order; K = M + 2 functions.  Throws on numerical linear dependence.
std::vector<RadialFunction> build_basis(int M, double a, double b);

struct IntegralTables {
    int K = 0;
    Eigen::MatrixXd h;      // K x K symmetric, kinetic + nuclear
    std::vector<double> g;  // K^4 chemists' (pq|rs), row-major
    double Z = 0.0;

    IntegralTables() = default;
    IntegralTables(int K_, double Z_) : K(K_), h(Eigen::MatrixXd::Zero(K_, K_)), g(static_cast<size_t>(K_) * K_ * K_ * K_, 0.0), Z(Z_) {}

    double& gref(int p, int q, int r, int s) {
        return g[static_cast<size_t>(((p * K + q) * K + r)) * K + s];
    }
    double g4(int p, int q, int r, int s) const {
        return g[static_cast<size_t>(((p * K + q) * K + r)) * K + s];
    }

    // Assign (pq|rs) together with its 8-fold symmetry images.
    void set_g(int p, int q, int r, int s, double value);

    // h symmetry and 8-fold g symmetry; physical positivity (pp|pp) > 0 is
    // checked only when check_positivity is set (synthetic test tables need
    // not satisfy it).
    void validate(double tol = 1e-10, bool check_positivity = false) const;

    std::string json() const;
    static IntegralTables from_json(const std::string& text);
};

IntegralTables build_integral_tables(const std::vector<RadialFunction>& basis, double Z);

// JSON cache keyed by (M, a, b, Z); returns nothing if the file is missing or
// the key mismatches.
struct TablesCacheKey {
    int M = 0;
    double a = 0, b = 0, Z = 0;
};
bool load_tables_cache(const std::string& path, const TablesCacheKey& key, IntegralTables& out);
void save_tables_cache(const std::string& path, const TablesCacheKey& key, const IntegralTables& tables);

}  // namespace pinscf
