#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "chiralab/continuum.hpp"

using namespace chiralab;

namespace {
constexpr double kEightThirds = 8.0 / 3.0;
}

TEST_CASE("continuum energy of a pure rotation with an admissible axis is zero") {
    PenaltySpec pen = PenaltySpec::dist_to_axes({kE3});
    ContinuumProfile rot = zero_cost_profile(kE3, kE3, 4.0);
    CHECK(continuum_energy(rot, &pen) <= 1e-10);
}

TEST_CASE("continuum energy of the tanh profile is 8/3 to 1e-4") {
    ContinuumProfile p = tanh_profile(kE3, -kE3, 12.0);
    CHECK(std::abs(continuum_energy(p) - kEightThirds) < 1e-4);
}

TEST_CASE("quadrature is second order: halving h quarters the change") {
    double e[3];
    int k = 0;
    for (double dt : {2e-3, 1e-3, 5e-4}) e[k++] = continuum_energy(tanh_profile(kE3, -kE3, 12.0, dt));
    double d1 = std::abs(e[1] - e[0]);
    double d2 = std::abs(e[2] - e[1]);
    CHECK(d2 <= d1 / 3.0);
}

TEST_CASE("free transitions relax towards zero as the span grows") {
    SolveOptions o;
    o.max_iters = 3000;
    o.seeds = {1};
    double prev = 1e9;
    for (double span : {8.0, 16.0, 32.0}) {
        ProfileProblem prob;
        prob.q_minus = kE3;
        prob.q_plus = kE2;
        prob.t_span = span;
        prob.h = 1e-2;
        double e = solve_profile(prob, o).energy;
        CHECK(e < prev);
        if (prev < 1e8) CHECK(e <= 0.75 * prev);
        prev = e;
    }
    CHECK(prev < 0.2);
}

TEST_CASE("hard transitions solve to 8/3 within 1e-3") {
    SolveOptions o;
    o.max_iters = 6000;
    o.seeds = {1};
    {
        ProfileProblem prob;
        prob.q_minus = kE3;
        prob.q_plus = -kE3;
        prob.constraint = ProfileProblem::Constraint::HardMk;
        prob.t_span = 10.0;
        prob.h = 1e-3;
        double e = solve_profile(prob, o).energy;
        CHECK(std::abs(e - kEightThirds) <= 1e-3);
    }
    {
        // two orthogonal circles; the crossing kink resolves at O(h), so the
        // finer default step is needed for the same tolerance
        ProfileProblem prob;
        prob.q_minus = kE3;
        prob.q_plus = kE1;
        prob.constraint = ProfileProblem::Constraint::HardMk;
        prob.t_span = 10.0;
        prob.h = 5e-4;
        o.max_iters = 8000;
        double e = solve_profile(prob, o).energy;
        CHECK(std::abs(e - kEightThirds) <= 1e-3);
    }
}

TEST_CASE("constraint nesting: free <= hard <= 8/3") {
    SolveOptions o;
    o.max_iters = 3000;
    o.seeds = {1};
    ProfileProblem base;
    base.q_minus = kE3;
    base.q_plus = -kE3;
    base.t_span = 12.0;
    base.h = 2e-3;
    double free_e = solve_profile(base, o).energy;
    ProfileProblem hard = base;
    hard.constraint = ProfileProblem::Constraint::HardMk;
    double hard_e = solve_profile(hard, o).energy;
    CHECK(free_e <= hard_e + 1e-9);
    CHECK(hard_e <= kEightThirds + 1e-3);
}

TEST_CASE("solver never returns energy above its initialization") {
    PenaltySpec pen = PenaltySpec::dist_to_axes({kE1, Vec3{std::cos(0.2), std::sin(0.2), 0.0}});
    ProfileProblem prob;
    prob.q_minus = kE1;
    prob.q_plus = -kE1;
    prob.pen = pen;
    prob.t_span = 12.0;
    prob.h = 4e-3;
    SolveOptions init_only;
    init_only.max_iters = 0;
    init_only.seeds = {1};
    double e0 = solve_profile(prob, init_only).energy;
    SolveOptions o;
    o.max_iters = 2500;
    o.seeds = {1};
    double e = solve_profile(prob, o).energy;
    CHECK(e <= e0 + 1e-9);
}

TEST_CASE("scaling the penalty up never lowers the solved cost") {
    SolveOptions o;
    o.max_iters = 2500;
    o.seeds = {1, 2};
    auto solve_with_scale = [&](double s) {
        ProfileProblem prob;
        prob.q_minus = kE1;
        prob.q_plus = Vec3{std::cos(0.2), std::sin(0.2), 0.0};
        prob.pen = PenaltySpec::dist_to_axes({kE1, Vec3{std::cos(0.2), std::sin(0.2), 0.0}}, s);
        prob.t_span = 12.0;
        prob.h = 4e-3;
        return solve_profile(prob, o).energy;
    };
    double e1 = solve_with_scale(1.0);
    double e2 = solve_with_scale(2.0);
    CHECK(e2 >= e1 - 1e-9);
}

TEST_CASE("h_G table: zero diagonal, bounded entries, ordering") {
    PenaltySpec pen = PenaltySpec::dist_to_axes({kE1, Vec3{std::cos(0.2), std::sin(0.2), 0.0}});
    SolveOptions o;
    o.max_iters = 2500;
    o.seeds = {1, 2};
    HgTable t = h_g_table(pen, o, 12.0, 5e-3);
    REQUIRE(t.axes.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(t.value[i][i] == 0.0);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) CHECK(t.value[i][j] <= kEightThirds + 1e-3);
    // trace dependence: the nearby pair costs less than the antipodal one
    CHECK(t.value[0][1] > 1e-6);
    CHECK(t.value[0][1] < t.value[0][2]);
}

TEST_CASE("profile problems validate their inputs") {
    ProfileProblem prob;
    prob.q_minus = kE3 * 2.0;
    prob.q_plus = kE2;
    CHECK_THROWS_AS(prob.validate(), ParameterError);
    prob.q_minus = kE3;
    prob.t_span = 1.0;
    CHECK_THROWS_AS(prob.validate(), ParameterError);
}
