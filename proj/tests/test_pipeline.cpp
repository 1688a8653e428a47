#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "oracles.hpp"
#include "pinscf/pipeline.hpp"

using namespace pinscf;

namespace {

RunConfig quick_m1() {
    RunConfig cfg;
    cfg.M = 1;
    cfg.optimize_exponents = false;
    cfg.solver.multistart = 2;
    return cfg;
}

}  // namespace

TEST_CASE("parse_occupations handles valid and malformed input") {
    auto v = parse_occupations("1, 0.5 ,0.25");
    REQUIRE(v.size() == 3);
    CHECK(v[0] == doctest::Approx(1.0));
    CHECK(v[1] == doctest::Approx(0.5));
    CHECK(v[2] == doctest::Approx(0.25));
    CHECK(parse_occupations("0.9,0.8,0.7,0.6,0.5,0.4").size() == 6);
    CHECK_THROWS_AS(parse_occupations(""), std::invalid_argument);
    CHECK_THROWS_AS(parse_occupations("1,,2"), std::invalid_argument);
    CHECK_THROWS(parse_occupations("1,two,3"));
    CHECK_THROWS_AS(parse_occupations("1,2x,3"), std::invalid_argument);
}

TEST_CASE("run_analyze mirrors the constraint module on the cli examples") {
    ConstraintReport hf = run_analyze({1, 1, 1, 0, 0, 0});
    CHECK(hf.representable);
    CHECK(*hf.bd_inequality_value == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(hf.hf_distance == doctest::Approx(0.0).epsilon(1e-14));

    ConstraintReport pinned = run_analyze({0.95, 0.85, 0.8, 0.2, 0.15, 0.05});
    CHECK(*pinned.bd_inequality_value == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(pinned.hf_distance == doctest::Approx(0.8).epsilon(1e-14));

    ConstraintReport bad = run_analyze({0.9, 0.8, 0.7, 0.6, 0.5, 0.4});
    CHECK_FALSE(bad.representable);
    REQUIRE(bad.bd_equality_residuals.has_value());
    for (double r : *bad.bd_equality_residuals) CHECK(r == doctest::Approx(0.3));
}

TEST_CASE("run config validation") {
    RunConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.M = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = RunConfig{};
    cfg.Z = -1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = RunConfig{};
    cfg.solver.gradient_tolerance = 0.0;
    CHECK_THROWS(cfg.validate());
}

TEST_CASE("lithium reference anchors") {
    CorrelationRefs refs = lithium_refs();
    CHECK(refs.hf_literature == doctest::Approx(-7.4324));
    CHECK(refs.exact_literature == doctest::Approx(-7.478));
    CHECK(refs.single_determinant == doctest::Approx(-7.4179));
}

TEST_CASE("lithium pipeline at M=1 with frozen exponents") {
    LithiumReport rep = run_lithium(quick_m1());
    CHECK(rep.converged);
    CHECK_FALSE(rep.exponent_stage.has_value());
    CHECK(rep.a_used == doctest::Approx(2.6864));
    CHECK(rep.b_used == doctest::Approx(1.2751));

    // The frozen single determinant sits at the optimized-exponent value.
    CHECK(std::abs(rep.single_det_energy - (-7.4179)) <= 5e-4);

    // Variational chain within the basis.
    CHECK(rep.bound.E0 <= rep.solve.energy + 1e-10);
    CHECK(rep.solve.energy <= rep.hf.energy + 1e-10);
    CHECK(rep.hf.energy <= rep.single_det_energy + 1e-9);

    // The bound-report stages agree with the directly reported ones.
    CHECK(rep.bound.E_HF == doctest::Approx(rep.hf.energy).epsilon(1e-8));
    CHECK(rep.bound.E_D == doctest::Approx(rep.solve.energy).epsilon(1e-8));

    // Recoveries present with the three declared labels.
    REQUIRE(rep.bound.recoveries.size() == 3);
    CHECK(rep.bound.recoveries[0].label == "basis-internal");
    CHECK(rep.bound.recoveries[1].label == "literature-HF");
    CHECK(rep.bound.recoveries[2].label == "single-determinant");
}

TEST_CASE("lithium report formats: json schema, text digits, csv row") {
    LithiumReport rep = run_lithium(quick_m1());

    nlohmann::json j = nlohmann::json::parse(rep.json());
    for (const char* key : {"config", "a_used", "b_used", "exponent_stage", "single_det_energy",
                            "hf", "mcscf", "bound", "converged"})
        CHECK(j.contains(key));
    CHECK(j["config"]["M"].get<int>() == 1);
    CHECK(j["mcscf"]["converged"].get<bool>());
    CHECK(j["mcscf"]["occupations"].size() == 6);
    CHECK(j["bound"]["E0"].get<double>() == doctest::Approx(rep.bound.E0).epsilon(1e-12));
    CHECK(j["mcscf"]["energy"].get<double>() == doctest::Approx(rep.solve.energy).epsilon(1e-12));

    std::string text = rep.text_table();
    CHECK(text.find("single determinant") != std::string::npos);
    CHECK(text.find("Hartree-Fock (basis)") != std::string::npos);
    CHECK(text.find("pinned MCSCF") != std::string::npos);
    CHECK(text.find("full CI (basis)") != std::string::npos);
    // Text and JSON agree at the printed 6-digit precision.
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", j["mcscf"]["energy"].get<double>());
    CHECK(text.find(buf) != std::string::npos);

    std::string csv = rep.csv();
    CHECK(csv.rfind(bound_csv_header(), 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);

    CHECK(format_report(rep, OutputFormat::Json) == rep.json());
    CHECK(format_report(rep, OutputFormat::Text) == rep.text_table());
    CHECK(format_report(rep, OutputFormat::Csv) == rep.csv());
}

TEST_CASE("lithium pipeline determinism") {
    LithiumReport a = run_lithium(quick_m1());
    LithiumReport b = run_lithium(quick_m1());
    CHECK(a.solve.energy == b.solve.energy);
    CHECK(a.bound.E0 == b.bound.E0);
    CHECK(a.json() == b.json());
}

TEST_CASE("integral cache round trip through the pipeline") {
    RunConfig cfg = quick_m1();
    cfg.cache_path = "pipeline_cache_test.json";
    std::remove(cfg.cache_path.c_str());
    LithiumReport first = run_lithium(cfg);
    FILE* f = std::fopen(cfg.cache_path.c_str(), "r");
    REQUIRE(f != nullptr);
    std::fclose(f);
    LithiumReport second = run_lithium(cfg);
    CHECK(first.solve.energy == doctest::Approx(second.solve.energy).epsilon(1e-13));
    CHECK(first.bound.E0 == doctest::Approx(second.bound.E0).epsilon(1e-13));
    std::remove(cfg.cache_path.c_str());
}

TEST_CASE("verify suites pass and report per-check data") {
    VerifySummary pin = run_verify("pinning", 2024);
    CHECK(pin.suite == "pinning");
    CHECK(pin.all_pass());
    for (const auto& c : pin.checks) {
        CHECK_FALSE(c.name.empty());
        CHECK(c.tolerance > 0.0);
        CHECK(c.observed >= 0.0);
        CHECK(c.observed <= c.tolerance);
    }

    VerifySummary bnd = run_verify("bounds", 2024);
    CHECK(bnd.all_pass());

    CHECK_THROWS_AS(run_verify("nonsense", 1), std::invalid_argument);
}

TEST_CASE("exponent stage feeds the pipeline when enabled") {
    RunConfig cfg = quick_m1();
    cfg.optimize_exponents = true;
    LithiumReport rep = run_lithium(cfg);
    REQUIRE(rep.exponent_stage.has_value());
    CHECK(rep.a_used == doctest::Approx(rep.exponent_stage->a));
    CHECK(rep.b_used == doctest::Approx(rep.exponent_stage->b));
    CHECK(std::abs(rep.a_used - 2.6864) <= 5e-3);
    CHECK(std::abs(rep.b_used - 1.2751) <= 5e-3);
    CHECK(std::abs(rep.exponent_stage->energy - (-7.4179)) <= 5e-4);
    // The frozen-basis single determinant at the optimum matches the stage.
    CHECK(rep.single_det_energy == doctest::Approx(rep.exponent_stage->energy).epsilon(1e-8));
}
