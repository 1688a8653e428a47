#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "oracles.hpp"
#include "pinscf/ansatz.hpp"

using namespace pinscf;

TEST_CASE("determinant enumeration matches the oracle") {
    for (auto [d, n] : std::vector<std::pair<int, int>>{{6, 3}, {8, 2}, {5, 4}}) {
        auto lib = all_determinants(d, n);
        auto ora = oracles::enumerate_determinants(d, n);
        std::sort(ora.begin(), ora.end());
        REQUIRE(lib.size() == ora.size());
        CHECK(std::is_sorted(lib.begin(), lib.end()));
        for (size_t i = 0; i < lib.size(); ++i) CHECK(lib[i] == ora[i]);
    }
    CHECK(all_determinants(6, 3).size() == 20);
    CHECK(sector_determinants(3, 2, 1).size() == 9);
    CHECK(sector_determinants(10, 2, 1).size() == 450);
}

TEST_CASE("sector determinants carry the right spin occupation") {
    for (const Determinant& det : sector_determinants(4, 2, 1)) {
        int n_up = 0, n_down = 0;
        for (int orb : det.orbitals()) ((orb % 2 == 1) ? n_up : n_down)++;
        CHECK(n_up == 2);
        CHECK(n_down == 1);
    }
}

TEST_CASE("one_rdm matches the brute-force contraction") {
    std::mt19937_64 rng(17);
    for (auto [d, n] : std::vector<std::pair<int, int>>{{6, 3}, {8, 3}, {5, 2}}) {
        for (int trial = 0; trial < 5; ++trial) {
            Wavefunction psi = oracles::random_wavefunction(rng, d, n);
            OneRDM rdm = one_rdm(psi);
            Eigen::MatrixXcd ref = oracles::one_rdm_by_operators(psi);
            CHECK((rdm.rho - ref).cwiseAbs().maxCoeff() <= 1e-13);
            CHECK(std::abs(rdm.rho.trace().real() - n) <= 1e-12);
        }
    }
}

TEST_CASE("natural occupations: ordering, reconstruction, determinism") {
    std::mt19937_64 rng(23);
    Wavefunction psi = oracles::random_wavefunction(rng, 6, 3);
    OneRDM rdm = one_rdm(psi);
    NaturalBasis nat = natural_occupations(rdm);
    CHECK(nat.occupations.is_ordered(1e-12));
    CHECK(nat.occupations.within_pauli_bounds(1e-10));
    Eigen::VectorXd lamv = Eigen::Map<const Eigen::VectorXd>(nat.occupations.values.data(), 6);
    Eigen::MatrixXcd D = lamv.cast<cplx>().asDiagonal();
    CHECK((nat.orbitals * D * nat.orbitals.adjoint() - rdm.rho).cwiseAbs().maxCoeff() <= 1e-12);
    // Unitarity and deterministic phases.
    CHECK((nat.orbitals.adjoint() * nat.orbitals - Eigen::MatrixXcd::Identity(6, 6))
              .cwiseAbs()
              .maxCoeff() <= 1e-12);
    NaturalBasis again = natural_occupations(one_rdm(psi));
    CHECK((nat.orbitals - again.orbitals).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("natural occupations handle exact degeneracy deterministically") {
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(4, 4);
    rho.topLeftCorner(2, 2) = Eigen::MatrixXcd::Identity(2, 2) * 0.75;
    rho.bottomRightCorner(2, 2) = Eigen::MatrixXcd::Identity(2, 2) * 0.25;
    NaturalBasis a = natural_occupations(OneRDM(rho));
    NaturalBasis b = natural_occupations(OneRDM(rho));
    CHECK((a.orbitals - b.orbitals).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.occupations[0] == doctest::Approx(0.75));
    CHECK(a.occupations[3] == doctest::Approx(0.25));
}

TEST_CASE("transform_to_natural_basis diagonalizes the 1-RDM") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 10; ++trial) {
        Wavefunction psi = oracles::random_wavefunction(rng, 6, 3);
        Wavefunction nat = transform_to_natural_basis(psi);
        CHECK(std::abs(nat.norm() - 1.0) <= 1e-12);
        OneRDM rdm = one_rdm(nat);
        OccupationVector lam = natural_occupations(one_rdm(psi)).occupations;
        for (int p = 0; p < 6; ++p) {
            CHECK(std::abs(rdm.rho(p, p).real() - lam[p]) <= 1e-10);
            for (int q = 0; q < 6; ++q)
                if (p != q) CHECK(std::abs(rdm.rho(p, q)) <= 1e-10);
        }
    }
}

TEST_CASE("number operator combos: eigenvalues and selection rules") {
    NumberOperatorCombo facet = bd_facet_operator();
    CHECK(facet.constant == doctest::Approx(2.0));
    CHECK(facet.integer_valued());
    CHECK(facet.eigenvalue(Determinant::from_orbitals({1, 2, 3})) == doctest::Approx(0.0));
    CHECK(facet.eigenvalue(Determinant::from_orbitals({1, 2, 4})) == doctest::Approx(-1.0));
    CHECK(facet.eigenvalue(Determinant::from_orbitals({3, 5, 6})) == doctest::Approx(2.0));

    auto eqs = bd_equality_operators();
    // Exhaustive enumeration over all 20 determinants: the equality-compatible
    // set has 8 members (one orbital from each conjugate pair), and adding the
    // facet operator cuts it to the three ansatz configurations.
    std::set<Determinant> compatible;
    for (const Determinant& det : all_determinants(6, 3)) {
        bool ok = true;
        for (const auto& eq : eqs) ok = ok && std::abs(eq.eigenvalue(det)) < 1e-12;
        if (ok) compatible.insert(det);
    }
    CHECK(compatible.size() == 8);
    for (const auto& det : compatible) {
        CHECK((det.occupied(1) ^ det.occupied(6)));
        CHECK((det.occupied(2) ^ det.occupied(5)));
        CHECK((det.occupied(3) ^ det.occupied(4)));
    }

    std::set<Determinant> pinned;
    for (const Determinant& det : compatible)
        if (std::abs(facet.eigenvalue(det)) < 1e-12) pinned.insert(det);
    std::set<Determinant> expected = {Determinant::from_orbitals({1, 2, 3}),
                                      Determinant::from_orbitals({1, 4, 5}),
                                      Determinant::from_orbitals({2, 4, 6})};
    CHECK(pinned == expected);

    // selection_rule_configs agrees with the enumeration, operator by operator.
    for (const auto& eq : eqs) {
        auto lib = selection_rule_configs(eq, 3, 6);
        std::set<Determinant> lib_set(lib.begin(), lib.end());
        std::set<Determinant> ref;
        for (const Determinant& det : all_determinants(6, 3))
            if (std::abs(eq.eigenvalue(det)) < 1e-12) ref.insert(det);
        CHECK(lib_set == ref);
    }
    auto facet_configs = selection_rule_configs(facet, 3, 6);
    std::set<Determinant> facet_set(facet_configs.begin(), facet_configs.end());
    std::set<Determinant> facet_ref;
    for (const Determinant& det : all_determinants(6, 3))
        if (std::abs(facet.eigenvalue(det)) < 1e-12) facet_ref.insert(det);
    CHECK(facet_set == facet_ref);
}

TEST_CASE("apply_number_combo is the diagonal action") {
    std::mt19937_64 rng(31);
    Wavefunction psi = oracles::random_wavefunction(rng, 6, 3);
    NumberOperatorCombo facet = bd_facet_operator();
    Wavefunction out = apply_number_combo(facet, psi);
    for (const auto& [det, amp] : psi.amplitudes)
        CHECK(std::abs(out.amplitude(det) - amp * facet.eigenvalue(det)) <= 1e-14);
    // Expectation value identity.
    double expect = inner(psi, out).real();
    double direct = 0.0;
    for (const auto& [det, amp] : psi.amplitudes)
        direct += std::norm(amp) * facet.eigenvalue(det);
    CHECK(expect == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("slater-condon matrix elements match explicit operator application") {
    std::mt19937_64 rng(37);
    std::normal_distribution<double> nd(0.0, 1.0);
    const int d = 6;
    // Random hermitian spin-orbital arrays with chemists' 8-fold symmetry.
    Eigen::MatrixXd h = Eigen::MatrixXd::NullaryExpr(d, d, [&]() { return nd(rng); });
    h = ((h + h.transpose()) / 2.0).eval();
    std::vector<double> g(static_cast<size_t>(d * d * d * d), 0.0);
    auto idx = [d](int p, int q, int r, int s) {
        return static_cast<size_t>(((p * d + q) * d + r) * d + s);
    };
    for (int p = 0; p < d; ++p)
        for (int q = p; q < d; ++q)
            for (int r = 0; r < d; ++r)
                for (int s = r; s < d; ++s) {
                    if (p * d + q > r * d + s) continue;
                    double v = nd(rng);
                    for (auto [i, j, k, l] :
                         {std::array<int, 4>{p, q, r, s}, {q, p, r, s}, {p, q, s, r}, {q, p, s, r},
                          {r, s, p, q}, {s, r, p, q}, {r, s, q, p}, {s, r, q, p}})
                        g[idx(i, j, k, l)] = v;
                }
    SpinHamiltonian ham = SpinHamiltonian::from_arrays(h, g);
    auto dets = all_determinants(d, 3);
    Eigen::MatrixXd lib = hamiltonian_matrix(ham, dets);
    Eigen::MatrixXd ref = oracles::hamiltonian_by_operators(ham, dets);
    CHECK((lib - ref).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((lib - lib.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("spatial embedding agrees between slater_condon overloads and oracle") {
    std::mt19937_64 rng(41);
    IntegralTables T = oracles::random_tables(rng, 3, 1.0, 0.4);
    SpinHamiltonian ham = SpinHamiltonian::from_spatial(T);
    CHECK(ham.d == 6);
    auto dets = all_determinants(6, 3);
    Eigen::MatrixXd ref = oracles::hamiltonian_by_operators(ham, dets);
    for (size_t i = 0; i < dets.size(); ++i)
        for (size_t j = 0; j < dets.size(); ++j) {
            double direct = slater_condon(dets[i], dets[j], T);
            CHECK(std::abs(direct - ref(static_cast<int>(i), static_cast<int>(j))) <= 1e-12);
        }
}

TEST_CASE("full CI ground state: dense, lanczos, and the oracle agree") {
    std::mt19937_64 rng(43);
    IntegralTables T = oracles::random_tables(rng, 3, 1.0, 0.4);
    SpinHamiltonian ham = SpinHamiltonian::from_spatial(T);
    auto dets = all_determinants(6, 3);
    Eigen::MatrixXd ref = oracles::hamiltonian_by_operators(ham, dets);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ref);

    CIResult dense = full_ci_ground(T, 3, 6, 2000);
    CHECK(dense.energy == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-11));
    CHECK(dense.residual <= 1e-9);
    CHECK(std::abs(dense.ground.norm() - 1.0) <= 1e-10);
    CHECK(dense.gap == doctest::Approx(es.eigenvalues()(1) - es.eigenvalues()(0)).epsilon(1e-9));

    CIResult lanczos = full_ci_ground(T, 3, 6, 1);  // force the iterative path
    CHECK(lanczos.energy == doctest::Approx(dense.energy).epsilon(1e-9));
    CHECK(lanczos.residual <= 1e-7);

    // Rayleigh quotient of the returned ground state matches its eigenvalue.
    double rq = 0.0;
    for (const auto& [da, ca] : dense.ground.amplitudes)
        for (const auto& [db, cb] : dense.ground.amplitudes)
            rq += (std::conj(ca) * cb).real() * slater_condon(da, db, ham);
    CHECK(rq == doctest::Approx(dense.energy).epsilon(1e-10));
}

TEST_CASE("wavefunction json round trip") {
    std::mt19937_64 rng(47);
    Wavefunction psi = oracles::random_wavefunction(rng, 6, 3);
    Wavefunction back = Wavefunction::from_json(psi.json());
    CHECK(back.d == psi.d);
    CHECK(back.n == psi.n);
    for (const auto& [det, amp] : psi.amplitudes)
        CHECK(std::abs(back.amplitude(det) - amp) <= 1e-15);
}
