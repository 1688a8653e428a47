// radial.cpp
#include "pinscf/radial.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

namespace pinscf {

namespace {

constexpr int kMaxFact = 80;

const double* factorials() {
    static const auto table = [] {
        std::array<double, kMaxFact> t{};
        t[0] = 1.0;
        for (int i = 1; i < kMaxFact; ++i) t[static_cast<size_t>(i)] = t[static_cast<size_t>(i - 1)] * i;
        return t;
    }();
    return table.data();
}

// int_0^inf r^p exp(-z r) dr = p! / z^{p+1}
double basic_integral(int p, double z) {
    if (p < 0 || p >= kMaxFact) throw std::logic_error("basic_integral power out of range");
    if (z <= 0.0) throw std::invalid_argument("non-positive exponent in radial integral");
    return factorials()[p] / std::pow(z, p + 1);
}

RadialFunction multiply(const RadialFunction& f, const RadialFunction& g) {
    RadialFunction out;
    out.terms.reserve(f.terms.size() * g.terms.size());
    for (const auto& a : f.terms) {
        for (const auto& b : g.terms) {
            out.terms.push_back({a.coeff * b.coeff, a.power + b.power, a.zeta + b.zeta});
        }
    }
    return out.consolidated();
}

// Radial derivative of r*f: sum c ((p+1) r^p - zeta r^{p+1}) exp(-zeta r).
RadialFunction r_times_derivative(const RadialFunction& f) {
    RadialFunction out;
    out.terms.reserve(2 * f.terms.size());
    for (const auto& t : f.terms) {
        out.terms.push_back({t.coeff * (t.power + 1), t.power, t.zeta});
        out.terms.push_back({-t.coeff * t.zeta, t.power + 1, t.zeta});
    }
    return out.consolidated();
}

// intint A(r1) B(r2) r1^2 r2^2 / r_> over one term pair, with the r^2 weights
// already folded into P = pa + 2, Q = pb + 2.  The r2-inside piece
//   Q!/beta^{Q+1} int r1^{P-1} e^{-alpha r1} (1 - e^{-beta r1} sum_{j<=Q} (beta r1)^j/j!) dr1
// is summed as the equivalent all-positive series
//   sum_{t>=0} Q! (P+Q+t)! / (Q+1+t)! beta^t / (alpha+beta)^{P+Q+1+t};
// the subtractive textbook form cancels up to eight digits when the bracket
// is small over the region carrying the integrand mass.  Everything runs in
// long double: the pair sum over two products of orthogonalized functions
// amplifies roundoff by the unsigned-to-signed mass ratio, up to ~1e9.
long double coulomb_pair(int P, long double alpha, int Q, long double beta) {
    const double* fact = factorials();
    const long double ab = alpha + beta;
    long double term = fact[P + Q] / (Q + 1.0L) / std::pow(ab, P + Q + 1);
    long double inside = 0.0L;
    for (int t = 0;; ++t) {
        inside += term;
        term *= beta / ab * (P + Q + t + 1.0L) / (Q + t + 2.0L);
        if (term < inside * 1e-21L) break;
        if (t > 100000) throw std::logic_error("coulomb_pair series failed to converge");
    }
    long double s2 = 0.0L;
    long double bpow = 1.0L;
    for (int j = 0; j < Q; ++j) {
        s2 += bpow / fact[j] * fact[P + j] / std::pow(ab, P + 1 + j);
        bpow *= beta;
    }
    return inside + fact[Q - 1] / std::pow(beta, Q) * s2;
}

struct TermLD {
    long double coeff = 0.0L;
    int power = 0;
    double zeta = 0.0;
};

// Product expansion with coefficients accumulated in long double; merging by
// the exact bit pattern of zeta mirrors RadialFunction::consolidated().
std::vector<TermLD> multiply_ld(const RadialFunction& f, const RadialFunction& g) {
    std::map<std::pair<int, long long>, TermLD> merged;
    for (const auto& a : f.terms) {
        for (const auto& b : g.terms) {
            double z = a.zeta + b.zeta;
            long long bits;
            std::memcpy(&bits, &z, sizeof(bits));
            auto& slot = merged[{a.power + b.power, bits}];
            slot.coeff += static_cast<long double>(a.coeff) * b.coeff;
            slot.power = a.power + b.power;
            slot.zeta = z;
        }
    }
    std::vector<TermLD> out;
    out.reserve(merged.size());
    for (const auto& [key, val] : merged)
        if (val.coeff != 0.0L) out.push_back(val);
    return out;
}

constexpr double kFourPi = 4.0 * std::numbers::pi;

}  // namespace

RadialFunction RadialFunction::consolidated() const {
    std::map<std::pair<int, long long>, std::pair<double, double>> merged;
    // key zeta by scaled-integer representation to merge exactly equal exponents
    for (const auto& t : terms) {
        auto key = std::make_pair(t.power, static_cast<long long>(0));
        // store zeta exactly: use bit pattern as key component
        static_assert(sizeof(double) == sizeof(long long));
        long long bits;
        std::memcpy(&bits, &t.zeta, sizeof(bits));
        key.second = bits;
        auto& slot = merged[key];
        slot.first += t.coeff;
        slot.second = t.zeta;
    }
    RadialFunction out;
    out.label = label;
    for (const auto& [key, val] : merged) {
        if (val.first != 0.0) {
            out.terms.push_back({val.first, key.first, val.second});
        }
    }
    return out;
}

double RadialFunction::evaluate(double r) const {
    double v = 0.0;
    for (const auto& t : terms) {
        // Far tail: exp underflow beats any polynomial growth; skipping avoids inf*0 = NaN.
        if (t.zeta * r > 700.0) continue;
        v += t.coeff * std::pow(r, t.power) * std::exp(-t.zeta * r);
    }
    return v;
}

double RadialFunction::min_zeta() const {
    double z = std::numeric_limits<double>::infinity();
    for (const auto& t : terms) z = std::min(z, t.zeta);
    return z;
}

RadialFunction scale(double c, const RadialFunction& f) {
    RadialFunction out = f;
    for (auto& t : out.terms) t.coeff *= c;
    return out;
}

RadialFunction add(const RadialFunction& f, const RadialFunction& g) {
    RadialFunction out;
    out.label = f.label;
    out.terms = f.terms;
    out.terms.insert(out.terms.end(), g.terms.begin(), g.terms.end());
    return out.consolidated();
}

RadialFunction shull_lowdin(int n, double a) {
    if (n < 1 || n > 12) throw std::invalid_argument("shull_lowdin requires 1 <= n <= 12");
    if (a <= 0.0) throw std::invalid_argument("shull_lowdin requires a > 0");
    const double* fact = factorials();
    double dn = std::sqrt(2.0 / (static_cast<double>(n) * (n + 1)));
    double pref = dn * std::sqrt(a * a * a / std::numbers::pi);
    RadialFunction out;
    out.label = "delta_" + std::to_string(n);
    int m = n - 1;  // L^2_m
    for (int k = 0; k <= m; ++k) {
        double binom = fact[m + 2] / (fact[m - k] * fact[k + 2]);
        double c = ((k % 2) ? -1.0 : 1.0) * binom / fact[k] * std::pow(2.0 * a, k);
        out.terms.push_back({pref * c, k, a});
    }
    return out;
}

RadialFunction hydrogenic_chi(int n, double b) {
    if (b <= 0.0) throw std::invalid_argument("hydrogenic_chi requires b > 0");
    RadialFunction out;
    out.label = "chi_" + std::to_string(n);
    if (n == 1) {
        out.terms.push_back({0.25 * std::sqrt(b * b * b * b * b / (6.0 * std::numbers::pi)), 1, b / 2.0});
    } else if (n == 2) {
        out.terms.push_back(
            {(2.0 / 81.0) * std::sqrt(std::pow(b, 7) / (30.0 * std::numbers::pi)), 2, b / 3.0});
    } else {
        throw std::invalid_argument("hydrogenic_chi supports n in {1, 2}");
    }
    return out;
}

double overlap(const RadialFunction& f, const RadialFunction& g) {
    double s = 0.0;
    for (const auto& t : multiply(f, g).terms) {
        s += t.coeff * basic_integral(t.power + 2, t.zeta);
    }
    return kFourPi * s;
}

double kinetic(const RadialFunction& f, const RadialFunction& g) {
    auto df = r_times_derivative(f);
    auto dg = r_times_derivative(g);
    double s = 0.0;
    for (const auto& t : multiply(df, dg).terms) {
        s += t.coeff * basic_integral(t.power, t.zeta);
    }
    return 0.5 * kFourPi * s;
}

double nuclear_attraction(const RadialFunction& f, const RadialFunction& g, double Z) {
    double s = 0.0;
    for (const auto& t : multiply(f, g).terms) {
        s += t.coeff * basic_integral(t.power + 1, t.zeta);
    }
    return -Z * kFourPi * s;
}

double coulomb_repulsion(const RadialFunction& f1, const RadialFunction& f2,
                         const RadialFunction& f3, const RadialFunction& f4) {
    auto A = multiply_ld(f1, f2);
    auto B = multiply_ld(f3, f4);
    long double s = 0.0L;
    for (const auto& ta : A) {
        for (const auto& tb : B) {
            s += ta.coeff * tb.coeff * coulomb_pair(ta.power + 2, ta.zeta, tb.power + 2, tb.zeta);
        }
    }
    return static_cast<double>(kFourPi * kFourPi * s);
}

std::vector<RadialFunction> build_basis(int M, double a, double b) {
    if (M < 1) throw std::invalid_argument("build_basis requires M >= 1");
    std::vector<RadialFunction> raw;
    raw.reserve(static_cast<size_t>(M) + 2);
    for (int n = 1; n <= M; ++n) raw.push_back(shull_lowdin(n, a));
    raw.push_back(hydrogenic_chi(1, b));
    raw.push_back(hydrogenic_chi(2, b));

    const int K = M + 2;
    Eigen::MatrixXd S(K, K);
    for (int p = 0; p < K; ++p) {
        for (int q = 0; q <= p; ++q) {
            S(p, q) = S(q, p) = overlap(raw[static_cast<size_t>(p)], raw[static_cast<size_t>(q)]);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
    if (lo <= 0.0 || hi / lo > 1e12) {
        throw std::runtime_error("build_basis: raw basis numerically linearly dependent (condition " +
                                 std::to_string(lo <= 0.0 ? std::numeric_limits<double>::infinity()
                                                          : hi / lo) + ")");
    }

    std::vector<RadialFunction> ortho;
    ortho.reserve(static_cast<size_t>(K));
    for (int p = 0; p < K; ++p) {
        RadialFunction f = raw[static_cast<size_t>(p)];
        for (int pass = 0; pass < 2; ++pass) {  // repeated classical Gram-Schmidt
            for (const auto& e : ortho) {
                f = add(f, scale(-overlap(e, f), e));
            }
        }
        double nn = overlap(f, f);
        if (nn <= 1e-12) {
            throw std::runtime_error("build_basis: Gram-Schmidt breakdown at function " +
                                     std::to_string(p + 1));
        }
        f = scale(1.0 / std::sqrt(nn), f);
        f.label = raw[static_cast<size_t>(p)].label;
        ortho.push_back(f);
    }
    return ortho;
}

void IntegralTables::set_g(int p, int q, int r, int s, double value) {
    gref(p, q, r, s) = value;
    gref(q, p, r, s) = value;
    gref(p, q, s, r) = value;
    gref(q, p, s, r) = value;
    gref(r, s, p, q) = value;
    gref(s, r, p, q) = value;
    gref(r, s, q, p) = value;
    gref(s, r, q, p) = value;
}

void IntegralTables::validate(double tol, bool check_positivity) const {
    if (h.rows() != K || h.cols() != K || g.size() != static_cast<size_t>(K) * K * K * K) {
        throw std::invalid_argument("integral table shape mismatch");
    }
    if ((h - h.transpose()).cwiseAbs().maxCoeff() > tol) {
        throw std::invalid_argument("one-electron table not symmetric");
    }
    for (int p = 0; p < K; ++p) {
        for (int q = 0; q <= p; ++q) {
            for (int r = 0; r < K; ++r) {
                for (int s = 0; s <= r; ++s) {
                    double v = g4(p, q, r, s);
                    if (std::abs(g4(q, p, r, s) - v) > tol || std::abs(g4(p, q, s, r) - v) > tol ||
                        std::abs(g4(r, s, p, q) - v) > tol) {
                        throw std::invalid_argument("two-electron table violates 8-fold symmetry");
                    }
                }
            }
        }
    }
    if (check_positivity) {
        for (int p = 0; p < K; ++p) {
            if (g4(p, p, p, p) <= 0.0) {
                throw std::invalid_argument("(pp|pp) not positive");
            }
        }
    }
}

std::string IntegralTables::json() const {
    nlohmann::json j;
    j["K"] = K;
    j["Z"] = Z;
    std::vector<double> hv(static_cast<size_t>(K) * K);
    for (int p = 0; p < K; ++p) {
        for (int q = 0; q < K; ++q) hv[static_cast<size_t>(p * K + q)] = h(p, q);
    }
    j["h"] = hv;
    j["g"] = g;
    return j.dump();
}

IntegralTables IntegralTables::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    IntegralTables t(j.at("K").get<int>(), j.at("Z").get<double>());
    auto hv = j.at("h").get<std::vector<double>>();
    if (hv.size() != static_cast<size_t>(t.K) * t.K) {
        throw std::invalid_argument("one-electron table size mismatch in JSON");
    }
    for (int p = 0; p < t.K; ++p) {
        for (int q = 0; q < t.K; ++q) t.h(p, q) = hv[static_cast<size_t>(p * t.K + q)];
    }
    t.g = j.at("g").get<std::vector<double>>();
    if (t.g.size() != static_cast<size_t>(t.K) * t.K * t.K * t.K) {
        throw std::invalid_argument("two-electron table size mismatch in JSON");
    }
    return t;
}

IntegralTables build_integral_tables(const std::vector<RadialFunction>& basis, double Z) {
    const int K = static_cast<int>(basis.size());
    IntegralTables t(K, Z);
    for (int p = 0; p < K; ++p) {
        for (int q = 0; q <= p; ++q) {
            double v = kinetic(basis[static_cast<size_t>(p)], basis[static_cast<size_t>(q)]) +
                       nuclear_attraction(basis[static_cast<size_t>(p)], basis[static_cast<size_t>(q)], Z);
            t.h(p, q) = v;
            t.h(q, p) = v;
        }
    }
    for (int p = 0; p < K; ++p) {
        for (int q = 0; q <= p; ++q) {
            for (int r = 0; r <= p; ++r) {
                for (int s = 0; s <= r; ++s) {
                    if (p * (p + 1) / 2 + q < r * (r + 1) / 2 + s) continue;
                    double v = coulomb_repulsion(basis[static_cast<size_t>(p)], basis[static_cast<size_t>(q)],
                                                 basis[static_cast<size_t>(r)], basis[static_cast<size_t>(s)]);
                    t.set_g(p, q, r, s, v);
                }
            }
        }
    }
    return t;
}

bool load_tables_cache(const std::string& path, const TablesCacheKey& key, IntegralTables& out) {
    std::ifstream in(path);
    if (!in) return false;
    nlohmann::json j;
    try {
        in >> j;
        const auto& k = j.at("key");
        if (k.at("M").get<int>() != key.M || k.at("a").get<double>() != key.a ||
            k.at("b").get<double>() != key.b || k.at("Z").get<double>() != key.Z) {
            return false;
        }
        out = IntegralTables::from_json(j.at("tables").dump());
    } catch (const std::exception&) {
        return false;
    }
    return true;
}

void save_tables_cache(const std::string& path, const TablesCacheKey& key,
                       const IntegralTables& tables) {
    nlohmann::json j;
    j["key"] = {{"M", key.M}, {"a", key.a}, {"b", key.b}, {"Z", key.Z}};
    j["tables"] = nlohmann::json::parse(tables.json());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write integral cache: " + path);
    out << j.dump();
}

}  // namespace pinscf
