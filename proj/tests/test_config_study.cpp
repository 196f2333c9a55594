#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "chfilm/study.hpp"

using namespace chfilm;

TEST_CASE("config parsing") {
    const Config cfg = Config::parse_string(
        "# comment\n"
        "surface.kind = torus\n"
        "surface.R = 2.0   # trailing comment\n"
        "grid.n1 = 48\n"
        "\n"
        "study.epsilons = 0.2, 0.1, 0.05\n"
        "bulk.seed = 42\n");
    CHECK(cfg.get_string("surface.kind", "flat") == "torus");
    CHECK(cfg.get_double("surface.R", 0.0) == 2.0);
    CHECK(cfg.get_int("grid.n1", 0) == 48);
    CHECK(cfg.get_int("grid.n2", 24) == 24);  // default
    CHECK(cfg.get_u64("bulk.seed", 1) == 42u);
    const std::vector<double> eps = cfg.get_list("study.epsilons", {});
    REQUIRE(eps.size() == 3);
    CHECK(eps[1] == 0.1);

    CHECK_THROWS_AS(Config::parse_string("surface.radius = 2\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse_string("surface.R\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse_file("/nonexistent/path.cfg"), ConfigError);

    const Config bad = Config::parse_string("grid.n1 = 12.5\nsurface.R = 2x\n");
    CHECK_THROWS_AS(bad.get_int("grid.n1", 0), ConfigError);
    CHECK_THROWS_AS(bad.get_double("surface.R", 0.0), ConfigError);
}

TEST_CASE("factories honor presets and defaults") {
    const Config dflt = Config::parse_string("");
    const SurfaceChart chart = make_chart(dflt);
    CHECK(chart.kind() == ChartKind::torus);
    const ThicknessProfile prof = make_profile(dflt);
    CHECK(prof.eval(chart, 0.3, 0.4).g == doctest::Approx(1.0));
    const Potential F = make_potential(dflt);
    CHECK(F.eval(1.0, 0) == doctest::Approx(0.0));

    const Config flat = Config::parse_string(
        "surface.kind = flat_sheet\n"
        "thickness.preset = sinusoidal\n"
        "thickness.params = 0.2, 1.0\n");
    const SurfaceChart fchart = make_chart(flat);
    CHECK(fchart.kind() == ChartKind::flat_sheet);
    CHECK(make_profile(flat).eval(fchart, 0.0, 0.0).g == doctest::Approx(1.2));

    const Config sine = Config::parse_string("study.v0 = sine\n");
    const SurfaceField v = make_v0(sine, 16, 16, 1);
    CHECK(v.at(4, 0) == doctest::Approx(0.1));  // 0.1 sin(pi/2)
    const SurfaceField r1 = make_v0(Config::parse_string("study.v0 = random\n"),
                                    16, 16, 7);
    const SurfaceField r2 = make_v0(Config::parse_string("study.v0 = random\n"),
                                    16, 16, 7);
    CHECK(r1.values == r2.values);
    CHECK_THROWS(make_v0(Config::parse_string("study.v0 = vortex\n"), 16, 16, 1));
}

TEST_CASE("convergence study rejects short epsilon lists") {
    const Config cfg = Config::parse_string("study.epsilons = 0.2, 0.1\n");
    CHECK_THROWS(run_convergence_study(cfg));
    const Config unsorted =
        Config::parse_string("study.epsilons = 0.1, 0.2, 0.05\n");
    CHECK_THROWS(run_convergence_study(unsorted));
}

TEST_CASE("verification suite passes on the default setup") {
    const Config cfg = Config::parse_string(
        "grid.n1 = 16\n"
        "grid.n2 = 8\n"
        "grid.n3 = 4\n");
    const VerificationReport rep = run_verification_suite(cfg);
    CHECK(rep.all_pass());
    CHECK(rep.checks.size() == 8);
    const std::string text = rep.to_text();
    CHECK(text.find("pass") != std::string::npos);
    CHECK(text.find("fail") == std::string::npos);
}

TEST_CASE("verification suite: geometry failure short-circuits") {
    const Config cfg = Config::parse_string(
        "epsilon = 5.0\n"
        "grid.n1 = 16\n"
        "grid.n2 = 8\n"
        "grid.n3 = 2\n");
    const VerificationReport rep = run_verification_suite(cfg);
    CHECK(!rep.all_pass());
    REQUIRE(!rep.checks.empty());
    CHECK(rep.checks[0].status == VerificationCheck::Status::fail);
    for (std::size_t q = 1; q < rep.checks.size(); ++q)
        CHECK(rep.checks[q].status == VerificationCheck::Status::skipped);
}

TEST_CASE("verification suite: sloppy tolerances fail only mass conservation") {
    const Config cfg = Config::parse_string(
        "grid.n1 = 16\n"
        "grid.n2 = 8\n"
        "grid.n3 = 2\n"
        "bulk.tau = 1e-2\n"
        "surface.tau = 1e-2\n"
        "bulk.tol_lin = 1e-6\n"
        "surface.tol_lin = 1e-6\n");
    const VerificationReport rep = run_verification_suite(cfg);
    CHECK(!rep.all_pass());
    bool mass_failed = false, energy_ok = false, pairing_ok = false;
    for (const auto& c : rep.checks) {
        if (c.name == "mass-conservation")
            mass_failed = c.status == VerificationCheck::Status::fail;
        if (c.name == "energy-monotone")
            energy_ok = c.status == VerificationCheck::Status::pass;
        if (c.name == "pairing-identity")
            pairing_ok = c.status == VerificationCheck::Status::pass;
    }
    CHECK(mass_failed);
    CHECK(energy_ok);
    CHECK(pairing_ok);
}

TEST_CASE("residual sweep is deterministic and decays") {
    const Config cfg = Config::parse_string(
        "grid.n1 = 16\n"
        "grid.n2 = 8\n"
        "grid.n3 = 8\n");
    const ResidualSweep a = run_residual_sweep(cfg);
    const ResidualSweep b = run_residual_sweep(cfg);
    CHECK(a.to_csv() == b.to_csv());
    REQUIRE(a.entries.size() >= 3);
    CHECK(a.rate_zeta_delta.slope >= 0.8);
    CHECK(a.rate_zeta_F.slope >= 0.8);
    CHECK(a.rate_grad_zeta_delta.slope >= 0.8);
    for (std::size_t q = 1; q < a.entries.size(); ++q)
        CHECK(a.entries[q].zeta_delta_L2 < a.entries[q - 1].zeta_delta_L2);
}
