#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "chiralab/minimize.hpp"
#include "chiralab/profiles.hpp"

using namespace chiralab;

namespace {
constexpr double kEightThirds = 8.0 / 3.0;

SpinChain constant_chain(std::size_t n, const Vec3& u, double lambda) {
    SpinChain c;
    c.spacing = lambda;
    c.spins.assign(n, u);
    return c;
}
}  // namespace

TEST_CASE("gradient vanishes at critical points") {
    ModelParams p;
    p.delta = 0.02;
    p.lambda = 1e-2;
    SpinChain helix = ground_helix(p.delta, Rotation::identity(), 80, p.lambda);
    auto g = gradient(helix, p, MinimizeMode::free_mode());
    double sup = 0;
    for (const auto& v : g) sup = std::max(sup, v.norm());
    CHECK(sup <= 1e-10);

    // the constant chain is also critical: each stencil is 2 delta u^{i+1},
    // whose tangential projection cancels in the symmetric assembly
    SpinChain c = constant_chain(80, kE2, p.lambda);
    auto gc = gradient(c, p, MinimizeMode::free_mode());
    for (const auto& v : gc) CHECK(v.norm() <= 1e-10);
}

TEST_CASE("gradient matches central finite differences in all modes") {
    std::mt19937_64 rng(43);
    std::normal_distribution<double> gauss;
    ModelParams p;
    p.delta = 0.05;
    p.lambda = 0.02;
    p.mu = 0.4;
    PenaltySpec pen = PenaltySpec::dist_to_axes({kE3, kE1});
    const double h = 1e-5, scale = p.energy_scale();

    for (int mode_id = 0; mode_id < 2; ++mode_id) {
        SpinChain chain;
        chain.spacing = p.lambda;
        for (int i = 0; i < 20; ++i) {
            Vec3 v{gauss(rng), gauss(rng), gauss(rng)};
            chain.spins.push_back((kE3 * 2.0 + v).normalized());
        }
        MinimizeMode mode =
            mode_id == 0 ? MinimizeMode::free_mode() : MinimizeMode::soft_g(pen);
        auto g = gradient(chain, p, mode);
        for (std::size_t j : {std::size_t(0), std::size_t(7), std::size_t(19)}) {
            Vec3 t = (kE1 - chain.spins[j] * chain.spins[j].dot(kE1)).normalized();
            auto at = [&](double dt) {
                SpinChain c2 = chain;
                c2.spins[j] = (chain.spins[j] + t * dt).normalized();
                double e = chain_energy(c2, p);
                if (mode_id == 1) e += penalty_energy(c2, p, pen);
                return e / scale;
            };
            double fd = (at(h) - at(-h)) / (2 * h);
            CHECK(g[j].dot(t) == doctest::Approx(fd).epsilon(1e-6));
        }
    }
}

TEST_CASE("perturbed ground helix relaxes back to zero energy") {
    ModelParams p;
    p.delta = 0.02;
    p.lambda = 1e-2;
    SpinChain helix = ground_helix(p.delta, Rotation::identity(), 101, p.lambda);
    SpinChain noisy = perturbed(helix, 0.05, 5);
    noisy.boundary = Boundary::periodic();
    MinimizeOptions o;
    o.max_iters = 50000;
    o.grad_tol = 1e-11;
    auto [out, rep] = minimize_chain(noisy, p, o);
    CHECK(chain_energy(out, p) <= 1e-10);
    CHECK(out.max_norm_drift() <= 1e-12);
    if (rep.converged) CHECK(rep.grad_norm <= o.grad_tol);
}

TEST_CASE("pinned free minimization never exceeds the rotating-axis certificate") {
    ModelParams p;
    p.delta = 1e-3;
    p.lambda = 0.05 * std::sqrt(p.delta);
    double t_avail = p.alpha_n() * std::sqrt(2.0 * p.delta) / p.lambda;
    double rho = 16.0;
    SpinChain cert = sample_chain(zero_cost_profile(kE3, kE2, rho), p.lambda, p.delta,
                                  0.5 - 0.5 * rho / t_avail);
    cert.boundary = Boundary::pinned(kE3, kE2);
    double cert_e = chain_energy_scaled(cert, p);
    MinimizeOptions o;
    o.max_iters = 3000;
    auto [out, rep] = minimize_chain(cert, p, o);
    CHECK(rep.scaled_energy <= cert_e + 1e-12);
    CHECK(out.max_norm_drift() <= 1e-12);
    // pins held
    CHECK((out.spins[0] - cert.spins[0]).norm() == 0.0);
    CHECK((out.spins[1] - cert.spins[1]).norm() == 0.0);
}

TEST_CASE("hard minimization: single circle transition reaches 8/3") {
    ModelParams p;
    p.delta = 1e-2;
    p.lambda = 0.05 * std::sqrt(p.delta);
    PenaltySpec pen = PenaltySpec::dist_to_axes({kE3});
    SpinChain init = sample_chain(tanh_profile(kE3, -kE3, 14.0, 1e-3), p.lambda, p.delta, 0.5);
    init.boundary = Boundary::pinned(kE3, -kE3);
    MinimizeOptions o;
    o.max_iters = 20000;
    o.grad_tol = 1e-8;
    auto [out, rep] = minimize_hard(init, p, pen, o);
    CHECK(std::abs(rep.scaled_energy - kEightThirds) <= 0.05 * kEightThirds);
    // output stays on the circle set exactly
    for (const auto& u : out.spins) CHECK(std::abs(u.dot(kE3)) <= 1e-12);
}

TEST_CASE("hard minimization across two circles switches labels near an intersection") {
    // the crossing between distinct circles resolves at O(sqrt(delta)), so
    // this one runs at the acceptance-scale delta
    ModelParams p;
    p.delta = 1e-3;
    p.lambda = 0.05 * std::sqrt(p.delta);
    PenaltySpec pen = PenaltySpec::dist_to_axes({kE3, kE1});
    SpinChain init = sample_chain(tanh_profile(kE3, kE1, 14.0, 1e-3), p.lambda, p.delta, 0.5);
    init.boundary = Boundary::pinned(kE3, kE1);
    MinimizeOptions o;
    o.max_iters = 30000;
    o.grad_tol = 1e-8;
    auto [out, rep] = minimize_hard(init, p, pen, o);
    CHECK(std::abs(rep.scaled_energy - kEightThirds) <= 0.05 * kEightThirds);
    // membership and a label switch at a near-intersection site
    auto [x1, x2] = pen.circle_intersections(0, 1);
    bool found_switch = false;
    for (std::size_t i = 0; i + 1 < out.size(); ++i) {
        std::size_t l0 = pen.nearest_circle(out.spins[i]);
        std::size_t l1 = pen.nearest_circle(out.spins[i + 1]);
        if (l0 != l1) {
            double d = std::min((out.spins[i] - x1).norm(), (out.spins[i] - x2).norm());
            CHECK(d <= 10.0 * std::sqrt(p.delta) + 0.2);
            found_switch = true;
        }
    }
    CHECK(found_switch);

    // a chain with all labels equal and same-circle pins never switches
    SpinChain planar = sample_chain(tanh_profile(kE3, -kE3, 14.0, 1e-3), p.lambda, p.delta, 0.5);
    planar.boundary = Boundary::pinned(kE3, -kE3);
    MinimizeOptions o2 = o;
    o2.max_iters = 5000;
    auto [out2, rep2] = minimize_hard(planar, p, pen, o2);
    for (const auto& u : out2.spins) CHECK(std::abs(u.dot(kE3)) <= 1e-12);

    // an init off both circles is rejected
    SpinChain bad = planar;
    bad.spins[5] = Vec3{1.0, 1.0, 1.0}.normalized();
    CHECK_THROWS_AS(minimize_hard(bad, p, pen, o2), ConstraintError);
}

TEST_CASE("seeded runs are bit-reproducible") {
    ModelParams p;
    p.delta = 0.02;
    p.lambda = 1e-2;
    SpinChain helix = perturbed(ground_helix(p.delta, Rotation::identity(), 60, p.lambda), 0.3, 9);
    MinimizeOptions o;
    o.max_iters = 500;
    o.seed = 1234;
    o.anneal = AnnealOptions{1e-3, 0.8, 8, 5, 0.2};
    SpinChain a1 = anneal(helix, p, o);
    SpinChain a2 = anneal(helix, p, o);
    REQUIRE(a1.size() == a2.size());
    for (std::size_t i = 0; i < a1.size(); ++i) CHECK((a1.spins[i] - a2.spins[i]).norm() == 0.0);

    auto [m1, r1] = minimize_chain(helix, p, o);
    auto [m2, r2] = minimize_chain(helix, p, o);
    CHECK(r1.final_energy == r2.final_energy);
    CHECK(r1.iterations == r2.iterations);
    CHECK(r1.grad_norm == r2.grad_norm);
}

TEST_CASE("zero-temperature annealing only descends") {
    ModelParams p;
    p.delta = 0.02;
    p.lambda = 1e-2;
    SpinChain noisy = perturbed(ground_helix(p.delta, Rotation::identity(), 60, p.lambda), 0.4, 3);
    double before = chain_energy(noisy, p);
    MinimizeOptions o;
    o.seed = 7;
    o.anneal = AnnealOptions{0.0, 0.5, 6, 10, 0.2};
    SpinChain out = anneal(noisy, p, o);
    CHECK(chain_energy(out, p) <= before + 1e-15);
}

TEST_CASE("annealed-then-polished hard transition stays near the certificate") {
    ModelParams p;
    p.delta = 1e-2;
    p.lambda = 0.05 * std::sqrt(p.delta);
    PenaltySpec pen = PenaltySpec::dist_to_axes({kE3});
    SpinChain cert = sample_chain(tanh_profile(kE3, -kE3, 14.0, 1e-3), p.lambda, p.delta, 0.5);
    cert.boundary = Boundary::pinned(kE3, -kE3);
    double cert_e = chain_energy_scaled(cert, p);
    MinimizeOptions o;
    o.max_iters = 20000;
    o.grad_tol = 1e-8;
    o.mode = MinimizeMode::hard_mk(pen);
    o.seed = 21;
    o.anneal = AnnealOptions{5e-3, 0.8, 10, 8, 0.1};
    SpinChain warm = anneal(cert, p, o);
    for (const auto& u : warm.spins) CHECK(std::abs(u.dot(kE3)) <= 1e-12);  // stays in M_k
    auto [out, rep] = minimize_hard(warm, p, pen, o);
    CHECK(rep.scaled_energy <= cert_e * 1.02);
}

TEST_CASE("soft minimization with pins never exceeds the soft-profile certificate") {
    ModelParams p;
    p.delta = 1e-2;
    p.lambda = 0.05 * std::sqrt(p.delta);
    p.mu = std::sqrt(2.0) * p.delta * p.delta;  // p_n * beta_n = 1
    PenaltySpec pen = PenaltySpec::dist_to_axes({kE3});
    SpinChain cert = sample_chain(soft_profile(kE3, -kE3, 0.1), p.lambda, p.delta, 0.5);
    cert.boundary = Boundary::pinned(kE3, -kE3);
    double cert_e = penalized_chain_energy(cert, p, pen) / p.energy_scale();
    MinimizeOptions o;
    o.max_iters = 6000;
    o.mode = MinimizeMode::soft_g(pen);
    auto [out, rep] = minimize_chain(cert, p, o);
    CHECK(rep.scaled_energy <= cert_e + 1e-12);
}

TEST_CASE("2d minimization with decoupled rows matches independent 1d runs") {
    ModelParams p;
    p.delta = 0.03;
    p.lambda = 1.0 / 32.0;
    p.j2 = 0.0;
    PenaltySpec pen = PenaltySpec::dist_to_axes({kE3});
    SpinChain base = sample_chain(tanh_profile(kE3, -kE3, 10.0, 1e-3), p.lambda, p.delta, 0.5);
    SpinField2D f;
    f.width = base.size();
    f.height = 4;
    f.spacing = p.lambda;
    f.spins.resize(f.width * f.height);
    for (std::size_t iy = 0; iy < f.height; ++iy)
        for (std::size_t ix = 0; ix < f.width; ++ix) f.at(ix, iy) = base.spins[ix];

    MinimizeOptions o;
    o.max_iters = 8000;
    o.grad_tol = 1e-10;
    o.pin_ends = true;
    auto [out, rep] = minimize_2d(f, p, pen, o);

    SpinChain row;
    row.spacing = p.lambda;
    row.boundary = Boundary::pinned(kE3, -kE3);
    row.spins = base.spins;
    MinimizeOptions o1 = o;
    o1.mode = MinimizeMode::soft_g(pen);
    // match the 2D objective: mu plays no role, the 2D penalty weight is delta^2
    ModelParams p1 = p;
    p1.mu = p.delta * p.delta;
    auto [rout, rrep] = minimize_chain(row, p1, o1);

    // rows of the J2 = 0 problem decouple into independent 1d problems
    double per_row = rep.final_energy / (static_cast<double>(f.height - 1) * p.lambda);
    CHECK(per_row == doctest::Approx(rrep.final_energy).epsilon(1e-8));
}

TEST_CASE("2d minimization flattens the vertical variation under strong coupling") {
    ModelParams p;
    p.delta = 0.04;
    p.lambda = 1.0 / 32.0;
    p.j2 = 10.0 * std::sqrt(p.delta) / p.lambda;
    PenaltySpec pen = PenaltySpec::dist_to_axes({kE3});
    SpinChain base = sample_chain(tanh_profile(kE3, -kE3, 10.0, 1e-3), p.lambda, p.delta, 0.5);
    SpinField2D f;
    f.width = base.size();
    f.height = 8;
    f.spacing = p.lambda;
    f.spins.resize(f.width * f.height);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> ua(-0.05, 0.05);
    for (std::size_t iy = 0; iy < f.height; ++iy)
        for (std::size_t ix = 0; ix < f.width; ++ix) {
            Vec3 u = base.spins[ix];
            if (ix >= 2 && ix + 2 < f.width) {
                Vec3 xi{ua(rng), ua(rng), ua(rng)};
                u = (u + xi - u * xi.dot(u)).normalized();
            }
            f.at(ix, iy) = u;
        }
    MinimizeOptions o;
    o.max_iters = 30000;
    o.grad_tol = 1e-10;
    o.pin_ends = true;
    auto [out, rep] = minimize_2d(f, p, pen, o);
    CHECK(y_variation(out) <= 1e-3 * rep.scaled_energy);
}

TEST_CASE("minimize options are validated") {
    MinimizeOptions o;
    o.max_iters = 0;
    CHECK_THROWS_AS(o.validate(), ParameterError);
    o.max_iters = 10;
    o.grad_tol = 0.0;
    CHECK_THROWS_AS(o.validate(), ParameterError);
}
