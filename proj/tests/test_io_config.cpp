#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "chiralab/io.hpp"
#include "chiralab/minimize.hpp"
#include "chiralab/sweep.hpp"

using namespace chiralab;

namespace {
std::string strip_wall_ms(const std::string& csv) {
    std::istringstream is(csv);
    std::ostringstream os;
    std::string line;
    while (std::getline(is, line)) {
        auto pos = line.rfind(',');
        os << line.substr(0, pos) << '\n';
    }
    return os.str();
}
}  // namespace

TEST_CASE("chain serialization round-trips bit-exactly") {
    SpinChain c = perturbed(ground_helix(0.05, Rotation::identity(), 40, 1e-2), 0.2, 5);
    std::ostringstream os;
    write_chain(os, c);
    std::istringstream is(os.str());
    SpinChain back = read_chain(is, c.spacing);
    REQUIRE(back.size() == c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        CHECK(back.spins[i].x == c.spins[i].x);
        CHECK(back.spins[i].y == c.spins[i].y);
        CHECK(back.spins[i].z == c.spins[i].z);
    }
}

TEST_CASE("malformed chain files report the offending line") {
    std::istringstream is("1 0 0\n0 1 0\nnot a number\n");
    try {
        read_chain(is, 0.1);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 3);
    }
    std::istringstream extra("1 0 0\n0 1 0 7\n0 0 1\n");
    CHECK_THROWS_AS(read_chain(extra, 0.1), ParseError);
}

TEST_CASE("profile serialization round-trips bit-exactly") {
    ContinuumProfile p = tanh_profile(kE3, kE2, 6.0, 1e-2);
    std::ostringstream os;
    write_profile(os, p);
    std::istringstream is(os.str());
    ContinuumProfile back = read_profile(is);
    REQUIRE(back.size() == p.size());
    for (std::size_t j = 0; j < p.size(); ++j) {
        CHECK(back.u[j].x == p.u[j].x);
        CHECK(back.w[j].z == p.w[j].z);
    }
}

TEST_CASE("breakdown record lists every field") {
    EnergyBreakdown b;
    b.total = 1.5;
    b.well_term = 0.5;
    std::ostringstream os;
    write_breakdown(os, b);
    std::string s = os.str();
    for (const char* key : {"total=", "well_term=", "gradient_term=", "cross_term=",
                            "penalty_term=", "ferro_2d_term=", "gamma_estimate="})
        CHECK(s.find(key) != std::string::npos);
}

TEST_CASE("config parsing: comments, sections, duplicates, types") {
    Config c = Config::parse(
        "# a comment\n"
        "sweep.regime = R_iv\n"
        "sweep.n = 0, 1, 2\n"
        "rules.delta0 = 1e-2\n"
        "pins.left = 0 0 1\n"
        "pen.axes = 0 0 1 | 1 0 0\n");
    CHECK(c.get_string("sweep.regime") == "R_iv");
    CHECK(c.get_int_list("sweep.n").size() == 3);
    CHECK(c.get_double("rules.delta0") == doctest::Approx(1e-2));
    CHECK(c.get_vec3("pins.left").z == 1.0);
    CHECK(c.get_vec3_list("pen.axes").size() == 2);
    CHECK(c.get_double("absent.key", 7.0) == 7.0);
    CHECK_THROWS_AS(c.get_double("sweep.regime"), ConfigError);
    CHECK_THROWS_AS(Config::parse("a = 1\na = 2\n"), ParseError);
    CHECK_THROWS_AS(Config::parse("just some text\n"), ParseError);
}

TEST_CASE("sweep config validation is total and regime-consistent") {
    auto base = [](const std::string& regime, const std::string& mu) {
        return "sweep.regime = " + regime +
               "\n"
               "sweep.n = 0,1,2\n"
               "rules.delta0 = 1e-2\n"
               "rules.ratio = 0.3\n"
               "rules.lambda_coeff = 0.05\n"
               "rules.lambda_exp = 0.75\n" +
               mu +
               "pen.axes = 0 0 1\n"
               "pins.left = 0 0 1\n"
               "pins.right = 0 0 -1\n";
    };
    // R_iii works with mu = sqrt(2) delta^2 (p_n beta_n = 1 exactly)
    CHECK_NOTHROW(SweepConfig::from_config(
        Config::parse(base("R_iii", "rules.mu_coeff = 1.4142135623730951\nrules.mu_exp = 2\n"))));
    // and rejects a rule with the wrong exponent
    CHECK_THROWS_AS(SweepConfig::from_config(Config::parse(
                        base("R_iii", "rules.mu_coeff = 1.0\nrules.mu_exp = 2.5\n"))),
                    ConfigError);
    // R_iv needs p_n beta_n to diverge
    CHECK_THROWS_AS(SweepConfig::from_config(Config::parse(
                        base("R_iv", "rules.mu_coeff = 1.0\nrules.mu_exp = 2.5\n"))),
                    ConfigError);
    CHECK_NOTHROW(SweepConfig::from_config(
        Config::parse(base("R_iv", "rules.mu_coeff = 0.45\nrules.mu_exp = 1.6\n"))));
    // unknown keys are rejected outright
    CHECK_THROWS_AS(SweepConfig::from_config(Config::parse(
                        base("R_iv", "rules.mu_coeff = 0.45\nrules.mu_exp = 1.6\n") +
                        "rules.typo = 3\n")),
                    ConfigError);
    // missing pins
    CHECK_THROWS_AS(SweepConfig::from_config(Config::parse(
                        "sweep.regime = FreeS2\nsweep.n = 0\nrules.delta0 = 1e-2\n"
                        "rules.ratio = 0.3\nrules.lambda_coeff = 0.05\nrules.lambda_exp = 0.5\n")),
                    ConfigError);
}

TEST_CASE("sweeps rerun identically apart from wall time") {
    SweepConfig cfg;
    cfg.regime = Regime::FreeS2;
    cfg.n_values = {0, 1};
    cfg.delta0 = 2e-3;
    cfg.ratio = 0.5;
    cfg.lambda_coeff = 0.05;
    cfg.lambda_exp = 0.5;
    cfg.pin_left = kE3;
    cfg.pin_right = kE2;
    cfg.max_iters = 200;
    cfg.seed = 11;
    SweepResult r1 = run_sweep(cfg, 1);
    SweepResult r2 = run_sweep(cfg, 2);
    CHECK(strip_wall_ms(sweep_csv(r1)) == strip_wall_ms(sweep_csv(r2)));
    CHECK(sweep_csv(r1, false) == sweep_csv(r2, false));
    REQUIRE(r1.rows.size() == 2);
    CHECK(r1.rows[0].run_id == "FreeS2_n0");
    // certificates always bound pinned free minimization rows
    CHECK(r1.rows[0].energy_scaled >= 0.0);
}

TEST_CASE("trace-dependent regime rows run end to end") {
    SweepConfig cfg;
    cfg.regime = Regime::R_iii;
    cfg.n_values = {0, 1};
    cfg.delta0 = 1e-2;
    cfg.ratio = 0.5;
    cfg.lambda_coeff = 0.05;
    cfg.lambda_exp = 0.75;
    cfg.mu_coeff = std::sqrt(2.0);
    cfg.mu_exp = 2.0;  // p_n * beta_n = 1 exactly
    cfg.pen = PenaltySpec::dist_to_axes({kE3});
    cfg.pin_left = kE3;
    cfg.pin_right = -kE3;
    cfg.max_iters = 400;
    SweepResult res = run_sweep(cfg, 1);
    REQUIRE(res.rows.size() == 2);
    for (const auto& r : res.rows) {
        CHECK(r.p_n * r.beta_n == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(r.energy_scaled > 0.0);
        CHECK(r.energy_scaled <= 8.0 / 3.0 + 0.1);
    }
}

TEST_CASE("2d sweep rows report the vertical variation") {
    SweepConfig cfg;
    cfg.regime = Regime::TwoD;
    cfg.n_values = {0};
    cfg.delta0 = 0.04;
    cfg.ratio = 0.5;
    cfg.lambda_coeff = 0.05;  // ignored: TwoD pins lambda to 1/width
    cfg.lambda_exp = 0.5;
    cfg.pen = PenaltySpec::dist_to_axes({kE3});
    cfg.pin_left = kE3;
    cfg.pin_right = -kE3;
    cfg.grid_width = 32;
    cfg.grid_height = 6;
    cfg.j2_coupling = 10.0;
    cfg.max_iters = 4000;
    SweepResult res = run_sweep(cfg, 1);
    REQUIRE(res.rows.size() == 1);
    const auto& r = res.rows[0];
    CHECK(r.lambda == doctest::Approx(1.0 / 32.0));
    CHECK(r.energy_scaled > 0.0);
    CHECK(r.y_variation <= 1e-3 * r.energy_scaled);
}

TEST_CASE("hg table serialization shape") {
    HgTable t;
    t.axes = {kE1, kE2, -kE1, -kE2};
    t.value.assign(4, std::vector<double>(4, 0.0));
    t.asym_flag.assign(4, std::vector<bool>(4, false));
    t.value[0][1] = 1.25;
    t.asym_flag[0][1] = true;
    std::ostringstream os;
    write_hg_table(os, t);
    std::string s = os.str();
    CHECK(s.find("+q1") != std::string::npos);
    CHECK(s.find("-q2") != std::string::npos);
    CHECK(s.find("1.25!") != std::string::npos);
}
