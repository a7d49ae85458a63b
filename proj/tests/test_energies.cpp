#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "chiralab/energies.hpp"
#include "chiralab/profiles.hpp"

using namespace chiralab;

namespace {

Vec3 random_unit(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    for (;;) {
        Vec3 v{g(rng), g(rng), g(rng)};
        if (v.norm() > 1e-6) return v.normalized();
    }
}

SpinChain constant_chain(std::size_t n, const Vec3& u, double lambda) {
    SpinChain c;
    c.spacing = lambda;
    c.boundary = Boundary::periodic();
    c.spins.assign(n, u);
    return c;
}

SpinChain alternating_chain(std::size_t n, double lambda) {
    SpinChain c;
    c.spacing = lambda;
    c.boundary = Boundary::periodic();
    for (std::size_t i = 0; i < n; ++i) c.spins.push_back(i % 2 ? -kE1 : kE1);
    return c;
}

SpinChain random_periodic_chain(std::mt19937_64& rng, std::size_t n, double max_angle,
                                double lambda) {
    std::uniform_real_distribution<double> ua(0.0, max_angle);
    SpinChain c;
    c.spacing = lambda;
    c.boundary = Boundary::periodic();
    c.spins.push_back(random_unit(rng));
    for (std::size_t i = 1; i < n; ++i) {
        Vec3 prev = c.spins.back();
        Vec3 t = random_unit(rng);
        t = (t - prev * t.dot(prev)).normalized();
        double a = ua(rng);
        c.spins.push_back((prev * std::cos(a) + t * std::sin(a)).normalized());
    }
    double target = c.spins[1].dot(c.spins[0]);
    Vec3 anchor = c.spins[n - 2];
    Vec3 t = (c.spins[n - 1] - anchor * c.spins[n - 1].dot(anchor)).normalized();
    c.spins[n - 1] = anchor * target + t * std::sqrt(std::max(0.0, 1.0 - target * target));
    return c;
}

SpinField2D extend_in_y(const SpinChain& chain, std::size_t height) {
    SpinField2D f;
    f.width = chain.size();
    f.height = height;
    f.spacing = chain.spacing;
    f.row_periodic = true;
    f.spins.resize(f.width * f.height);
    for (std::size_t iy = 0; iy < height; ++iy)
        for (std::size_t ix = 0; ix < f.width; ++ix) f.at(ix, iy) = chain.spins[ix];
    return f;
}

// brute-force oracle for the raw 2D Hamiltonian
double hamiltonian_2d_oracle(const SpinField2D& f, double j0, double j2, double lambda) {
    double total = 0;
    for (std::size_t iy = 0; iy + 1 < f.height; ++iy)
        for (std::size_t ix = 0; ix + 2 < f.width; ++ix)
            total -= lambda * lambda *
                     (j0 * f.at(ix, iy).dot(f.at(ix + 1, iy)) -
                      f.at(ix, iy).dot(f.at(ix + 2, iy)) +
                      j2 * f.at(ix, iy).dot(f.at(ix, iy + 1)));
    return total;
}

}  // namespace

TEST_CASE("chain energy vanishes on the ground helix") {
    ModelParams p;
    p.delta = 0.1;
    p.lambda = 1e-2;
    SpinChain helix = ground_helix(p.delta, Rotation::identity(), 101, p.lambda);
    CHECK(chain_energy(helix, p) <= 1e-12);
    CHECK(chain_energy_scaled(helix, p) <= 1e-9);
}

TEST_CASE("chain energy of the constant chain is 2 delta^2 per unit length") {
    // every stencil equals 2 delta u, so each term contributes (1/2)(2 delta)^2
    ModelParams p;
    p.delta = 0.1;
    p.lambda = 1e-2;
    SpinChain c = constant_chain(103, kE2, p.lambda);
    double expected = 2.0 * p.delta * p.delta * covered_length(c);
    CHECK(chain_energy(c, p) == doctest::Approx(expected).epsilon(1e-13));
    CHECK(chain_energy_scaled(c, p) ==
          doctest::Approx(expected / p.energy_scale()).epsilon(1e-13));
}

TEST_CASE("chain energy of the alternating chain") {
    // stencil = (4 - 2 delta) u^i up to sign, each term (1/2)(4-2delta)^2
    ModelParams p;
    p.delta = 0.1;
    p.lambda = 1e-2;
    SpinChain c = alternating_chain(64, p.lambda);
    double expected = 0.5 * (4.0 - 2.0 * p.delta) * (4.0 - 2.0 * p.delta) * covered_length(c);
    CHECK(chain_energy(c, p) == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("chain energy needs three sites") {
    ModelParams p;
    p.delta = 0.1;
    p.lambda = 1e-2;
    SpinChain c = constant_chain(2, kE3, p.lambda);
    CHECK_THROWS_AS(chain_energy(c, p), DimensionError);
}

TEST_CASE("raw 2d Hamiltonian: constant field at j0=4, delta=0, j2=1") {
    ModelParams p;
    p.lambda = 1.0 / 32.0;
    p.delta = 0.0;
    p.j0 = 4.0;
    p.j2 = 1.0;
    SpinField2D f = extend_in_y(constant_chain(33, kE3, p.lambda), 33);
    double covered = covered_area(f);
    CHECK(hamiltonian_2d(f, p) == doctest::Approx(-4.0 * covered).epsilon(1e-12));
    CHECK(hamiltonian_2d(f, p) ==
          doctest::Approx(hamiltonian_2d_oracle(f, 4.0, 1.0, p.lambda)).epsilon(1e-12));
}

TEST_CASE("ground state reaches the closed-form 2d minimum") {
    ModelParams p;
    p.delta = 0.05;
    p.lambda = 1.0 / 40.0;
    p.j2 = 3.0;
    SpinChain helix = ground_helix(p.delta, Rotation::between(kE3, kE2), 41, p.lambda);
    SpinField2D f = extend_in_y(helix, 12);
    double e = hamiltonian_2d(f, p);
    double e0 = ground_energy_2d(f, p);
    CHECK(std::abs(e - e0) / std::abs(e0) < 1e-10);
    CHECK(renormalized_2d(f, p) <= 1e-12);
    // identity E = H - (1 + J0^2/8 + J2)(1 - a_n) under the row boundary
    double lhs = hamiltonian_2d(f, p);
    double rhs = renormalized_2d(f, p) + e0;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("undersized grids raise dimension errors") {
    ModelParams p;
    p.delta = 0.05;
    p.lambda = 0.1;
    SpinField2D f = extend_in_y(constant_chain(8, kE3, p.lambda), 1);
    CHECK_THROWS_AS(hamiltonian_2d(f, p), DimensionError);
    CHECK_THROWS_AS(renormalized_2d(f, p), DimensionError);
}

TEST_CASE("renormalized 2d energy of the constant field") {
    ModelParams p;
    p.delta = 0.07;
    p.lambda = 1.0 / 24.0;
    SpinField2D f = extend_in_y(constant_chain(25, kE1, p.lambda), 10);
    double expected = 2.0 * p.delta * p.delta * covered_area(f);
    CHECK(renormalized_2d(f, p) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("rotating one row of the ground state costs only the seam energy") {
    ModelParams p;
    p.delta = 0.05;
    p.lambda = 1.0 / 30.0;
    SpinChain helix = ground_helix(p.delta, Rotation::identity(), 31, p.lambda);
    SpinField2D f = extend_in_y(helix, 6);
    p.j2 = 2.0;
    Rotation r = Rotation::axis_angle(kE1, 0.3);
    std::size_t row = 3;
    for (std::size_t ix = 0; ix < f.width; ++ix) f.at(ix, row) = r * f.at(ix, row);
    double e = renormalized_2d(f, p);
    CHECK(e > 0.0);
    // oracle: x-stencils still vanish, only the two seams contribute
    KahanSum seam;
    for (std::size_t iy : {row - 1, row})
        for (std::size_t ix = 0; ix + 2 < f.width; ++ix)
            seam.add((f.at(ix, iy + 1) - f.at(ix, iy)).norm2());
    double expected = 0.5 * p.j2 * p.lambda * p.lambda * seam.value();
    CHECK(e == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("hard energy checks circle membership") {
    ModelParams p;
    p.delta = 0.05;
    p.lambda = 1e-2;
    PenaltySpec pen = PenaltySpec::dist_to_axes({kE3});
    SpinChain helix = ground_helix(p.delta, Rotation::identity(), 51, p.lambda);
    CHECK(hard_chain_energy(helix, p, pen) <= 1e-12);
    helix.spins[20] = Vec3{0.0, std::sin(0.1), std::cos(0.1)};  // 0.1 rad off the circle
    CHECK_THROWS_WITH_AS(hard_chain_energy(helix, p, pen),
                         doctest::Contains("spin 20"), ConstraintError);
}

TEST_CASE("penalty energy on tilted helices") {
    ModelParams p;
    p.delta = 0.05;
    p.lambda = 1e-2;
    p.mu = 0.7;
    PenaltySpec pen = PenaltySpec::dist_to_axes({kE3});

    SpinChain aligned = ground_helix(p.delta, Rotation::identity(), 101, p.lambda);
    CHECK(penalty_energy(aligned, p, pen) <= 1e-12);

    double tilt = 0.5;
    SpinChain tilted =
        ground_helix(p.delta, Rotation::axis_angle(kE1, tilt), 101, p.lambda);
    double g = 2.0 * std::sin(tilt / 2.0);  // chordal distance of the axis to +-e3
    double expected = p.mu * covered_length(tilted) * g;
    CHECK(penalty_energy(tilted, p, pen) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(penalized_chain_energy(tilted, p, pen) ==
          doctest::Approx(chain_energy(tilted, p) + expected).epsilon(1e-12));

    // parallel consecutive spins contribute zero (G(0) = 0)
    SpinChain c = constant_chain(10, kE1, p.lambda);
    CHECK(penalty_energy(c, p, pen) == 0.0);
}

TEST_CASE("sandwich decomposition on the ground helix and the constant chain") {
    ModelParams p;
    p.delta = 0.04;
    p.lambda = 1e-2;
    SpinChain helix = ground_helix(p.delta, Rotation::identity(), 101, p.lambda);
    EnergyBreakdown b = sandwich_decomposition(helix, p);
    CHECK(b.well_term <= 1e-10);
    CHECK(b.gradient_term <= 1e-10);
    CHECK(b.total <= 1e-10);

    SpinChain c = constant_chain(101, kE3, p.lambda);
    EnergyBreakdown bc = sandwich_decomposition(c, p);
    double w_expected = std::sqrt(2.0 * p.delta) / p.lambda * covered_length(c);
    CHECK(bc.well_term == doctest::Approx(w_expected).epsilon(1e-12));
    CHECK(bc.gradient_term <= 1e-15);

    SpinChain free_chain = c;
    free_chain.boundary = Boundary::free();
    CHECK_THROWS_AS(sandwich_decomposition(free_chain, p), ParameterError);

    // angles beyond pi/4 leave the bounds inapplicable, which is flagged
    SpinChain alt = alternating_chain(20, p.lambda);
    EnergyBreakdown ba = sandwich_decomposition(alt, p);
    CHECK(!ba.sandwich_applicable());
}

TEST_CASE("exact recombination and sandwich bounds on random chains") {
    std::mt19937_64 rng(31);
    ModelParams p;
    p.delta = 0.05;
    p.lambda = 1e-2;
    for (int trial = 0; trial < 25; ++trial) {
        SpinChain c = random_periodic_chain(rng, 60, M_PI / 4 - 0.1, p.lambda);
        EnergyBreakdown b = sandwich_decomposition(c, p);
        CHECK(std::abs(b.total - (b.well_term + b.cross_term)) <=
              1e-10 * std::max(1.0, std::abs(b.total)));
        REQUIRE(b.sandwich_applicable());
        CHECK(b.total >= b.well_term + (1.0 - b.gamma_estimate) * b.gradient_term - 1e-10);
        CHECK(b.total <= b.well_term + b.gradient_term + 1e-10);
        CHECK(chain_energy(c, p) >= -1e-12);
    }
}

TEST_CASE("renormalization identity: H = F - min F on periodic chains") {
    // independent route through the raw couplings:
    //   F(u) = -sum_R lambda (J0 (u^i,u^{i+1}) - (u^i,u^{i+2}))
    //   min F = -(1 + J0^2/8) * covered length
    std::mt19937_64 rng(29);
    ModelParams p;
    p.delta = 0.07;
    p.lambda = 1e-2;
    double j0 = p.j0_effective();
    for (int trial = 0; trial < 20; ++trial) {
        SpinChain c = random_periodic_chain(rng, 70, 1.2, p.lambda);
        KahanSum f;
        for (std::size_t i = 0; i + 2 < c.size(); ++i)
            f.add(j0 * c.spins[i].dot(c.spins[i + 1]) - c.spins[i].dot(c.spins[i + 2]));
        double raw = -p.lambda * f.value();
        double ground = -(1.0 + j0 * j0 / 8.0) * covered_length(c);
        CHECK(chain_energy(c, p) ==
              doctest::Approx(raw - ground).epsilon(1e-10));
    }
}

TEST_CASE("2d renormalization identity on random row-periodic fields") {
    std::mt19937_64 rng(33);
    ModelParams p;
    p.delta = 0.06;
    p.lambda = 1.0 / 40.0;
    p.j2 = 1.7;
    SpinField2D f;
    f.width = 30;
    f.height = 5;
    f.spacing = p.lambda;
    f.row_periodic = true;
    f.spins.resize(f.width * f.height);
    for (std::size_t iy = 0; iy < f.height; ++iy) {
        SpinChain row = random_periodic_chain(rng, f.width, 0.9, p.lambda);
        for (std::size_t ix = 0; ix < f.width; ++ix) f.at(ix, iy) = row.spins[ix];
    }
    double lhs = hamiltonian_2d(f, p);
    double rhs = renormalized_2d(f, p) + ground_energy_2d(f, p);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
}

TEST_CASE("zero energy characterizes ground helices") {
    ModelParams p;
    p.delta = 0.05;
    p.lambda = 1e-2;
    // helix: zero
    CHECK(chain_energy(ground_helix(p.delta, Rotation::identity(), 60, p.lambda), p) <= 1e-12);
    // correct consecutive angle but rotating axis: strictly positive
    double t_avail = p.alpha_n() * std::sqrt(2.0 * p.delta) / p.lambda;
    SpinChain rotating = sample_chain(zero_cost_profile(kE3, kE2, 0.8 * t_avail), p.lambda,
                                      p.delta, 0.1);
    CHECK(chain_energy(rotating, p) > 1e-8);
    // constant axis but wrong angle: strictly positive
    SpinChain wrong;
    wrong.spacing = p.lambda;
    double phi = safe_acos(1.0 - 2.0 * p.delta);
    for (int i = 0; i < 60; ++i) wrong.spins.push_back({std::cos(phi * i), std::sin(phi * i), 0});
    CHECK(chain_energy(wrong, p) > 1e-8);
}

TEST_CASE("hard energy of the sampled transition sits near 8/3") {
    ModelParams p;
    p.delta = 1e-3;
    p.lambda = 0.05 * std::sqrt(p.delta);
    PenaltySpec pen = PenaltySpec::dist_to_axes({kE3});
    SpinChain c = sample_chain(tanh_profile(kE3, -kE3, 14.0, 1e-3), p.lambda, p.delta, 0.5);
    double e = hard_chain_energy(c, p, pen) / p.energy_scale();
    CHECK(e > 0.0);
    CHECK(std::abs(e - 8.0 / 3.0) < 0.05 * (8.0 / 3.0));
}

TEST_CASE("penalized 2d energy: aligned zero, tilted pays the penalty only") {
    ModelParams p;
    p.delta = 0.05;
    p.lambda = 1.0 / 20.0;
    PenaltySpec pen = PenaltySpec::dist_to_axes({kE3});
    SpinField2D aligned = extend_in_y(ground_helix(p.delta, Rotation::identity(), 21, p.lambda), 5);
    CHECK(renormalized_2d_penalized(aligned, p, pen) <= 1e-12);

    double tilt = 0.3;
    SpinField2D tilted =
        extend_in_y(ground_helix(p.delta, Rotation::axis_angle(kE1, tilt), 21, p.lambda), 5);
    double g = 2.0 * std::sin(tilt / 2.0);
    double expected = p.delta * p.delta * covered_area(tilted) * g;
    CHECK(renormalized_2d_penalized(tilted, p, pen) == doctest::Approx(expected).epsilon(1e-10));

    // a 1d transition extended in y stacks the per-row penalized energies
    ModelParams pt = p;
    pt.delta = 0.02;
    SpinChain row = sample_chain(tanh_profile(kE3, -kE3, 10.0, 1e-3), pt.lambda, pt.delta, 0.5);
    SpinField2D f = extend_in_y(row, 6);
    ModelParams p1 = pt;
    p1.mu = pt.delta * pt.delta;  // matches the fixed 2d weight
    double rows = static_cast<double>(f.height - 1);
    CHECK(renormalized_2d_penalized(f, pt, pen) ==
          doctest::Approx(rows * pt.lambda * penalized_chain_energy(row, p1, pen)).epsilon(1e-10));
}

TEST_CASE("rotation invariance of the energy but not of the penalty") {
    std::mt19937_64 rng(37);
    ModelParams p;
    p.delta = 0.05;
    p.lambda = 1e-2;
    p.mu = 1.0;
    PenaltySpec pen = PenaltySpec::dist_to_axes({kE3});
    SpinChain tilted = ground_helix(p.delta, Rotation::axis_angle(kE1, 0.4), 80, p.lambda);
    for (int trial = 0; trial < 10; ++trial) {
        Rotation r = Rotation::between(kE3, random_unit(rng)) *
                     Rotation::axis_angle(kE3, trial * 0.37);
        SpinChain moved = rotated(tilted, r);
        CHECK(std::abs(chain_energy(moved, p) - chain_energy(tilted, p)) <=
              1e-10 * std::max(1.0, chain_energy(tilted, p)));
    }
    SpinChain swung = rotated(tilted, Rotation::axis_angle(kE1, 0.7));
    CHECK(std::abs(penalty_energy(swung, p, pen) - penalty_energy(tilted, p, pen)) > 1e-4);
    // a rotation about the penalty axis preserves Q_k and hence the penalty
    SpinChain spun = rotated(tilted, Rotation::axis_angle(kE3, 1.1));
    CHECK(penalty_energy(spun, p, pen) ==
          doctest::Approx(penalty_energy(tilted, p, pen)).epsilon(1e-10));
}

TEST_CASE("a field constant in y reduces to stacked 1d energies") {
    ModelParams p;
    p.delta = 0.03;
    p.lambda = 1.0 / 50.0;
    std::mt19937_64 rng(41);
    SpinChain c = random_periodic_chain(rng, 51, 0.4, p.lambda);
    SpinField2D f = extend_in_y(c, 7);
    double rows = static_cast<double>(f.height - 1);
    CHECK(renormalized_2d(f, p) ==
          doctest::Approx(rows * p.lambda * chain_energy(c, p)).epsilon(1e-10));
}

TEST_CASE("compactness diagnostic") {
    ModelParams p;
    p.delta = 0.02;
    p.lambda = 1e-2;
    SpinChain helix = ground_helix(p.delta, Rotation::identity(), 60, p.lambda);
    auto d = compactness_diagnostic(helix, p, 0.1);
    CHECK(d.angle_ratio <= 1e-12);
    SpinChain c = constant_chain(60, kE3, p.lambda);
    auto dc = compactness_diagnostic(c, p, 0.1);
    CHECK(dc.angle_ratio == doctest::Approx(p.delta / std::sqrt(0.1)).epsilon(1e-12));
    CHECK_THROWS_AS(compactness_diagnostic(c, p, 0.0), ParameterError);
}

TEST_CASE("compactness ratios stay bounded across a delta sweep of transitions") {
    // low-energy transition chains: mu_scale = H / (C lambda) keeps both
    // monitored ratios bounded as delta shrinks
    double first_angle = 0.0, first_cont = 0.0;
    bool first = true;
    for (double delta : {1e-2, 3e-3, 1e-3}) {
        ModelParams p;
        p.delta = delta;
        p.lambda = 0.05 * std::sqrt(delta);
        SpinChain c = sample_chain(tanh_profile(kE3, -kE3, 14.0, 1e-3), p.lambda, p.delta, 0.5);
        double mu_scale = chain_energy(c, p) / p.lambda;
        auto d = compactness_diagnostic(c, p, mu_scale);
        if (first) {
            first_angle = d.angle_ratio;
            first_cont = d.continuity_ratio;
            first = false;
        }
        CHECK(d.angle_ratio <= 1.5 * first_angle + 0.1);
        CHECK(d.continuity_ratio <= 1.5 * first_cont + 0.1);
    }
}

TEST_CASE("penalty spot checks: nonnegative, zero-homogeneous, zero on the axes") {
    std::mt19937_64 rng(47);
    PenaltySpec pen = PenaltySpec::dist_to_axes({kE3, kE1});
    for (const auto& q : pen.axes()) {
        CHECK(pen(q) == 0.0);
        CHECK(pen(-q) == 0.0);
    }
    CHECK(pen(Vec3{}) == 0.0);
    for (int i = 0; i < 200; ++i) {
        Vec3 z = random_unit(rng) * 2.0;
        CHECK(pen(z) >= 0.0);
        CHECK(pen(z * 3.0) == doctest::Approx(pen(z)).epsilon(1e-14));
        CHECK(pen(z * 0.04) == doctest::Approx(pen(z)).epsilon(1e-14));
    }
    CHECK_THROWS_AS(PenaltySpec::dist_to_axes({kE3, kE3}), ParameterError);
    CHECK_THROWS_AS(PenaltySpec::dist_to_axes({kE3, -kE3}), ParameterError);
    CHECK_THROWS_AS(PenaltySpec::dist_to_axes({}), ParameterError);

    // custom penalties go through the same interface, gradient included
    PenaltySpec doubled = PenaltySpec::custom(
        {kE3}, [](const Vec3& d) { return 2.0 - 2.0 * d.z * d.z; });
    CHECK(doubled(kE3) == 0.0);
    Vec3 z{0.6, 0.0, 0.8};
    Vec3 g = doubled.gradient(z);
    const double h = 1e-6;
    double fd = (doubled(z + kE1 * h) - doubled(z - kE1 * h)) / (2 * h);
    CHECK(g.x == doctest::Approx(fd).epsilon(1e-4));
}

TEST_CASE("model parameter validation and derived quantities") {
    ModelParams p;
    p.lambda = 1e-3;
    p.delta = 1e-2;
    p.mu = 2e-6;
    CHECK(p.alpha_n() == doctest::Approx(std::acos(0.99) / std::sqrt(0.02)).epsilon(1e-14));
    CHECK(p.beta_n() == doctest::Approx(1e-3 / 0.1).epsilon(1e-14));
    CHECK(p.energy_scale() == doctest::Approx(std::sqrt(2.0) * 1e-3 * 1e-3).epsilon(1e-14));
    CHECK(p.p_n() == doctest::Approx(p.mu / p.energy_scale()).epsilon(1e-14));
    CHECK(p.j0_effective() == doctest::Approx(4.0 * 0.99));
    p.delta = 1.5;
    CHECK_THROWS_AS(p.validate(), ParameterError);
}
