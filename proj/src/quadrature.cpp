// Quadrature-based radial integrals, kept independent of the closed forms in
// radial.cpp so they can serve as cross-checks.  One-electron integrals are
// numeric exp-sinh over the half line.  The two-electron integral keeps the
// outer r1 integration numeric but evaluates the inner r2 potential per term
// in closed form: nesting two adaptive rules leaves the outer integrand with
// a noise floor that caps the achievable relative accuracy near 1e-8.
#include "pinscf/quadrature.hpp"

#include <cmath>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>

namespace pinscf {
namespace quadrature {

namespace {

constexpr double kFourPi = 4.0 * 3.14159265358979323846;
constexpr double kTol = 1e-14;

double eval(const RadialFunction& f, double r) { return f.evaluate(r); }

// (r f)'(r) for f = sum c r^k exp(-zeta r).
double eval_rderiv(const RadialFunction& f, double r) {
    double s = 0.0;
    for (const auto& t : f.terms) {
        // Far tail: exp underflow beats any polynomial growth; skipping avoids inf*0 = NaN.
        if (t.zeta * r > 700.0) continue;
        s += t.coeff * ((t.power + 1) * std::pow(r, t.power) - t.zeta * std::pow(r, t.power + 1)) *
             std::exp(-t.zeta * r);
    }
    return s;
}

template <typename F>
double semi_infinite(F fn) {
    boost::math::quadrature::exp_sinh<double> integrator;
    return integrator.integrate(fn, kTol);
}

// ---- closed-form inner potential for the two-electron integral ---------

struct ProductTerm {
    double coeff;
    int power;
    double zeta;
};

std::vector<ProductTerm> product_terms(const RadialFunction& f, const RadialFunction& g) {
    std::vector<ProductTerm> out;
    out.reserve(f.terms.size() * g.terms.size());
    for (const auto& a : f.terms)
        for (const auto& b : g.terms)
            out.push_back({a.coeff * b.coeff, a.power + b.power, a.zeta + b.zeta});
    return out;
}

// e^{-s} sum_{k>=n} s^k/k!, stable for all s >= 0: the complement of the
// Poisson head, summed as a tail series where the complement would cancel.
double poisson_tail(int n, double s) {
    if (s <= 0.0) return n == 0 ? 1.0 : 0.0;
    if (s > 700.0) return 1.0;
    if (n <= static_cast<int>(s)) {
        double head = 0.0, t = std::exp(-s);
        for (int k = 0; k < n; ++k) {
            head += t;
            t *= s / (k + 1);
        }
        return 1.0 - head;
    }
    double t = std::exp(-s);
    for (int k = 0; k < n; ++k) t *= s / (k + 1);
    double sum = 0.0;
    for (int k = n; k < n + 400; ++k) {
        sum += t;
        t *= s / (k + 1);
        if (t < sum * 1e-18) break;
    }
    return sum;
}

// e^{-s} sum_{k<n} s^k/k!; all terms positive, no cancellation.
double poisson_head(int n, double s) {
    if (s > 700.0) return 0.0;
    double head = 0.0, t = std::exp(-s);
    for (int k = 0; k < n; ++k) {
        head += t;
        t *= s / (k + 1);
    }
    return head;
}

// int_0^x r^{m+2} e^{-zeta r} dr
double lower_moment(int m, double zeta, double x) {
    return std::tgamma(m + 3.0) / std::pow(zeta, m + 3) * poisson_tail(m + 3, zeta * x);
}

// int_x^inf r^{m+1} e^{-zeta r} dr
double upper_moment(int m, double zeta, double x) {
    return std::tgamma(m + 2.0) / std::pow(zeta, m + 2) * poisson_head(m + 2, zeta * x);
}

}  // namespace

double overlap(const RadialFunction& f, const RadialFunction& g) {
    return kFourPi * semi_infinite([&](double r) { return eval(f, r) * eval(g, r) * r * r; });
}

double kinetic(const RadialFunction& f, const RadialFunction& g) {
    return 0.5 * kFourPi *
           semi_infinite([&](double r) { return eval_rderiv(f, r) * eval_rderiv(g, r); });
}

double nuclear_attraction(const RadialFunction& f, const RadialFunction& g, double Z) {
    return -Z * kFourPi * semi_infinite([&](double r) { return eval(f, r) * eval(g, r) * r; });
}

double coulomb_repulsion(const RadialFunction& f, const RadialFunction& g,
                         const RadialFunction& h, const RadialFunction& k) {
    auto hk = product_terms(h, k);
    auto outer = [&](double r1) {
        if (r1 <= 0.0) return 0.0;
        double fg = eval(f, r1) * eval(g, r1);
        if (fg == 0.0) return 0.0;
        double near = 0.0, far = 0.0;
        for (const auto& t : hk) {
            near += t.coeff * lower_moment(t.power, t.zeta, r1);
            far += t.coeff * upper_moment(t.power, t.zeta, r1);
        }
        return fg * r1 * (near + r1 * far);
    };
    return kFourPi * kFourPi * semi_infinite(outer);
}

}  // namespace quadrature
}  // namespace pinscf
