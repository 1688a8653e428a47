#include <doctest.h>

#include <random>
#include <set>

#include "oracles.hpp"
#include "pinscf/solver.hpp"

using namespace pinscf;

namespace {

BDCoefficients random_coeffs(std::mt19937_64& rng) {
    std::normal_distribution<double> nd(0.0, 1.0);
    BDCoefficients c{cplx(nd(rng), nd(rng)), cplx(nd(rng), nd(rng)), cplx(nd(rng), nd(rng))};
    return c.normalized();
}

// Parity of the permutation sorting `orbs` ascending.
int sort_parity(std::vector<int> orbs) {
    int swaps = 0;
    for (size_t i = 0; i < orbs.size(); ++i)
        for (size_t j = i + 1; j < orbs.size(); ++j)
            if (orbs[i] > orbs[j]) {
                std::swap(orbs[i], orbs[j]);
                ++swaps;
            }
    return swaps % 2 == 0 ? 1 : -1;
}

}  // namespace

TEST_CASE("spin assignment parsing and labels") {
    CHECK(parse_assignment("A") == SpinAssignment::A);
    CHECK(parse_assignment("B") == SpinAssignment::B);
    CHECK_THROWS(parse_assignment("auto"));
    CHECK_THROWS(parse_assignment("c"));
    CHECK(to_string(SpinAssignment::A) == "A");
    CHECK(to_string(SpinAssignment::B) == "B");
}

TEST_CASE("assignment level maps") {
    const int mapA[7] = {0, 1, 3, 2, 5, 6, 4};
    const int mapB[7] = {0, 3, 1, 2, 5, 4, 6};
    for (int level = 1; level <= 6; ++level) {
        CHECK(assignment_spin_orbital(SpinAssignment::A, level) == mapA[level]);
        CHECK(assignment_spin_orbital(SpinAssignment::B, level) == mapB[level]);
    }
    CHECK_THROWS(assignment_spin_orbital(SpinAssignment::A, 0));
    CHECK_THROWS(assignment_spin_orbital(SpinAssignment::A, 7));
    // Each map pairs every level with a distinct spin orbital.
    for (auto sa : {SpinAssignment::A, SpinAssignment::B}) {
        std::set<int> seen;
        for (int level = 1; level <= 6; ++level) seen.insert(assignment_spin_orbital(sa, level));
        CHECK(seen.size() == 6);
    }
}

TEST_CASE("assignment determinants and reordering signs") {
    // Level configurations {1,2,3}, {1,4,5}, {2,4,6} mapped through each
    // assignment; the sign is the parity of sorting the mapped labels.
    const std::array<std::array<int, 3>, 3> levels = {{{1, 2, 3}, {1, 4, 5}, {2, 4, 6}}};
    for (auto sa : {SpinAssignment::A, SpinAssignment::B}) {
        auto dets = assignment_determinants(sa);
        auto signs = assignment_signs(sa);
        for (int k = 0; k < 3; ++k) {
            std::vector<int> mapped;
            for (int level : levels[static_cast<size_t>(k)])
                mapped.push_back(assignment_spin_orbital(sa, level));
            CHECK(dets[static_cast<size_t>(k)] == Determinant::from_orbitals(mapped));
            CHECK(signs[static_cast<size_t>(k)] == doctest::Approx(sort_parity(mapped)));
        }
    }
    auto detsA = assignment_determinants(SpinAssignment::A);
    CHECK(detsA[0] == Determinant::from_orbitals({1, 2, 3}));
    CHECK(detsA[1] == Determinant::from_orbitals({1, 5, 6}));
    CHECK(detsA[2] == Determinant::from_orbitals({3, 4, 5}));
    auto signsA = assignment_signs(SpinAssignment::A);
    CHECK(signsA[0] == doctest::Approx(-1.0));
    CHECK(signsA[1] == doctest::Approx(1.0));
    CHECK(signsA[2] == doctest::Approx(-1.0));
}

TEST_CASE("bd_state places signed amplitudes on the assignment determinants") {
    std::mt19937_64 rng(53);
    BDCoefficients c = random_coeffs(rng);
    for (auto sa : {SpinAssignment::A, SpinAssignment::B}) {
        Wavefunction psi = bd_state(c, sa);
        CHECK(psi.d == 6);
        CHECK(psi.n == 3);
        CHECK(std::abs(psi.norm() - 1.0) <= 1e-12);
        auto dets = assignment_determinants(sa);
        auto signs = assignment_signs(sa);
        const cplx coeffs[3] = {c.alpha, c.beta, c.gamma};
        for (int k = 0; k < 3; ++k)
            CHECK(std::abs(psi.amplitude(dets[static_cast<size_t>(k)]) -
                           signs[static_cast<size_t>(k)] * coeffs[k]) <= 1e-15);
    }
}

TEST_CASE("the two assignments describe the same state after (a,b,g) -> (-a,g,b)") {
    std::mt19937_64 rng(59);
    BDCoefficients c = random_coeffs(rng);
    BDCoefficients swapped{-c.alpha, c.gamma, c.beta};
    Wavefunction psiA = bd_state(c, SpinAssignment::A);
    Wavefunction psiB = bd_state(swapped, SpinAssignment::B);
    for (const auto& [det, amp] : psiA.amplitudes)
        CHECK(std::abs(psiB.amplitude(det) - amp) <= 1e-15);
    // Consequently every energy agrees.
    IntegralTables T = oracles::random_tables(rng, 3, 1.0, 0.4);
    CHECK(ansatz_energy(c, SpinAssignment::A, T) ==
          doctest::Approx(ansatz_energy(swapped, SpinAssignment::B, T)).epsilon(1e-12));
}

TEST_CASE("self-consistency predicate and closed-form occupations") {
    BDCoefficients good{std::sqrt(0.7), std::sqrt(0.2), std::sqrt(0.1)};
    CHECK(check_selfconsistency(good));
    BDCoefficients bad_order{std::sqrt(0.7), std::sqrt(0.1), std::sqrt(0.2)};
    CHECK_FALSE(check_selfconsistency(bad_order));
    BDCoefficients bad_weight{std::sqrt(0.4), std::sqrt(0.35), std::sqrt(0.25)};
    CHECK_FALSE(check_selfconsistency(bad_weight));

    OccupationVector non = bd_non_closed_form(good);
    CHECK(non[0] == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(non[1] == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(non[2] == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(non[3] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(non[4] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(non[5] == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(non.sum() == doctest::Approx(3.0).epsilon(1e-12));
    for (double r : bd_equality_residuals(non)) CHECK(std::abs(r) <= 1e-12);
    CHECK(bd_inequality(non) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("closed-form occupations match the 1-RDM spectrum") {
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> ua(0.55, 0.95), uf(0.55, 0.95), ph(0.0, 6.2831853);
    for (int trial = 0; trial < 200; ++trial) {
        double a2 = ua(rng), frac = uf(rng);
        auto phase = [&]() { return std::exp(cplx(0.0, ph(rng))); };
        BDCoefficients c{std::sqrt(a2) * phase(), std::sqrt(frac * (1.0 - a2)) * phase(),
                         std::sqrt((1.0 - frac) * (1.0 - a2)) * phase()};
        REQUIRE(check_selfconsistency(c, 1e-9));
        SpinAssignment sa = (trial % 2 == 0) ? SpinAssignment::A : SpinAssignment::B;
        OccupationVector closed = bd_non_closed_form(c);
        OccupationVector nat = natural_occupations(one_rdm(bd_state(c, sa))).occupations;
        for (int k = 0; k < 6; ++k) CHECK(std::abs(closed[k] - nat[k]) <= 1e-12);
    }
}

TEST_CASE("csf matrix reproduces the ansatz energy as a quadratic form") {
    std::mt19937_64 rng(67);
    for (int trial = 0; trial < 10; ++trial) {
        IntegralTables T = oracles::random_tables(rng, 4, 1.0, 0.4);
        for (auto sa : {SpinAssignment::A, SpinAssignment::B}) {
            Eigen::Matrix3cd M = csf_matrix(sa, T);
            CHECK((M - M.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
            BDCoefficients c = random_coeffs(rng);
            Eigen::Vector3cd v(c.alpha, c.beta, c.gamma);
            double quad = (v.adjoint() * M * v)(0, 0).real();
            CHECK(quad == doctest::Approx(ansatz_energy(c, sa, T)).epsilon(1e-11));
        }
    }
}

TEST_CASE("ansatz energy against the dense hamiltonian oracle") {
    std::mt19937_64 rng(71);
    for (int trial = 0; trial < 5; ++trial) {
        IntegralTables T = oracles::random_tables(rng, 3, 1.0, 0.4);
        SpinHamiltonian ham = SpinHamiltonian::from_spatial(T);
        auto dets = oracles::enumerate_determinants(6, 3);
        Eigen::MatrixXd H = oracles::hamiltonian_by_operators(ham, dets);
        BDCoefficients c = random_coeffs(rng);
        for (auto sa : {SpinAssignment::A, SpinAssignment::B}) {
            Wavefunction psi = bd_state(c, sa);
            Eigen::VectorXcd vec = Eigen::VectorXcd::Zero(static_cast<int>(dets.size()));
            for (size_t i = 0; i < dets.size(); ++i) vec(static_cast<int>(i)) = psi.amplitude(dets[i]);
            double e = (vec.adjoint() * H.cast<cplx>() * vec)(0, 0).real();
            CHECK(e == doctest::Approx(ansatz_energy(c, sa, T)).epsilon(1e-11));
        }
    }
}

TEST_CASE("orbital rotations: construction, unitarity, logarithm") {
    std::mt19937_64 rng(73);
    std::normal_distribution<double> nd(0.0, 0.4);
    const int K = 4;
    Eigen::MatrixXcd G = Eigen::MatrixXcd::NullaryExpr(K, K, [&]() { return cplx(nd(rng), nd(rng)); });
    G = ((G - G.adjoint()) / 2.0).eval();
    OrbitalRotation rot(G);
    Eigen::MatrixXcd U = rot.unitary();
    CHECK((U.adjoint() * U - Eigen::MatrixXcd::Identity(K, K)).cwiseAbs().maxCoeff() <= 1e-12);

    CHECK_THROWS(OrbitalRotation(Eigen::MatrixXcd::Ones(K, K)));  // not antihermitian

    OrbitalRotation id = OrbitalRotation::identity(K);
    CHECK((id.unitary() - Eigen::MatrixXcd::Identity(K, K)).cwiseAbs().maxCoeff() <= 1e-14);

    OrbitalRotation back = OrbitalRotation::from_unitary(U);
    CHECK((back.generator + back.generator.adjoint()).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((back.unitary() - U).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("rotate_orbitals: quarter-turn swap and round trip") {
    std::mt19937_64 rng(79);
    IntegralTables T = oracles::random_tables(rng, 3, 1.0, 0.4);
    Eigen::MatrixXd U = Eigen::MatrixXd::Identity(3, 3);
    U(0, 0) = 0.0;
    U(1, 1) = 0.0;
    U(0, 1) = -1.0;
    U(1, 0) = 1.0;  // phi'_0 = phi_1, phi'_1 = -phi_0
    IntegralTables R = rotate_orbitals(T, U);
    CHECK(R.h(0, 0) == doctest::Approx(T.h(1, 1)).epsilon(1e-12));
    CHECK(R.h(1, 1) == doctest::Approx(T.h(0, 0)).epsilon(1e-12));
    CHECK(R.h(0, 1) == doctest::Approx(-T.h(0, 1)).epsilon(1e-12));
    CHECK(R.h(2, 2) == doctest::Approx(T.h(2, 2)).epsilon(1e-12));
    CHECK(R.g4(0, 0, 0, 0) == doctest::Approx(T.g4(1, 1, 1, 1)).epsilon(1e-12));
    CHECK(R.g4(0, 1, 0, 1) == doctest::Approx(T.g4(0, 1, 0, 1)).epsilon(1e-12));
    CHECK(R.g4(0, 0, 2, 2) == doctest::Approx(T.g4(1, 1, 2, 2)).epsilon(1e-12));

    IntegralTables back = rotate_orbitals(R, Eigen::MatrixXd(U.transpose()));
    CHECK((back.h - T.h).cwiseAbs().maxCoeff() <= 1e-12);
    for (size_t i = 0; i < T.g.size(); ++i) CHECK(std::abs(back.g[i] - T.g[i]) <= 1e-12);

    CHECK_THROWS(rotate_orbitals(T, Eigen::MatrixXd(2.0 * U)));  // not orthogonal
}

TEST_CASE("generator and explicit-matrix rotations agree") {
    std::mt19937_64 rng(83);
    std::normal_distribution<double> nd(0.0, 0.3);
    const int K = 4;
    IntegralTables T = oracles::random_tables(rng, K, 1.0, 0.4);
    Eigen::MatrixXd A = Eigen::MatrixXd::NullaryExpr(K, K, [&]() { return nd(rng); });
    A = ((A - A.transpose()) / 2.0).eval();
    OrbitalRotation rot(A.cast<cplx>());
    IntegralTables via_gen = rotate_orbitals(T, rot);
    Eigen::MatrixXd U = rot.unitary().real();
    IntegralTables via_mat = rotate_orbitals(T, U);
    CHECK((via_gen.h - via_mat.h).cwiseAbs().maxCoeff() <= 1e-11);
    for (size_t i = 0; i < T.g.size(); ++i) CHECK(std::abs(via_gen.g[i] - via_mat.g[i]) <= 1e-11);
}

TEST_CASE("full CI energy is invariant under orbital rotation") {
    std::mt19937_64 rng(89);
    std::normal_distribution<double> nd(0.0, 0.3);
    const int K = 3;
    IntegralTables T = oracles::random_tables(rng, K, 1.0, 0.4);
    Eigen::MatrixXd A = Eigen::MatrixXd::NullaryExpr(K, K, [&]() { return nd(rng); });
    A = ((A - A.transpose()) / 2.0).eval();
    IntegralTables R = rotate_orbitals(T, OrbitalRotation(A.cast<cplx>()));
    double e0 = full_ci_ground(T, 3, 6).energy;
    double e1 = full_ci_ground(R, 3, 6).energy;
    CHECK(e0 == doctest::Approx(e1).epsilon(1e-10));
}

TEST_CASE("coefficient validation") {
    BDCoefficients c{0.6, 0.8, 0.0};
    CHECK_NOTHROW(c.validate(1e-12));
    BDCoefficients un{1.0, 1.0, 0.0};
    CHECK_THROWS(un.validate(1e-12));
    CHECK(std::abs(un.normalized().norm_sq() - 1.0) <= 1e-14);
}
