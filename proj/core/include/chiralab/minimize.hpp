#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "chiralab/energies.hpp"
#include "chiralab/geometry.hpp"
#include "chiralab/penalty.hpp"

namespace chiralab {

struct AnnealOptions {
    double t_init = 1e-2;  // initial temperature, in scaled-energy units
    double t_factor = 0.85;
    int n_temps = 25;
    int moves_per_site = 20;
    double step = 0.3;  // proposal magnitude
};

struct MinimizeMode {
    enum class Kind { free, hard, soft };
    Kind kind = Kind::free;
    std::optional<PenaltySpec> pen;

    static MinimizeMode free_mode() { return {}; }
    static MinimizeMode hard_mk(PenaltySpec p) { return {Kind::hard, std::move(p)}; }
    static MinimizeMode soft_g(PenaltySpec p) { return {Kind::soft, std::move(p)}; }
};

struct MinimizeOptions {
    int max_iters = 20000;
    double grad_tol = 1e-9;  // sup-norm of the scaled Riemannian gradient
    double step_init = 1.0;
    MinimizeMode mode;
    bool pin_ends = false;  // hold the first two and last two spins fixed
    std::uint64_t seed = 1;
    std::optional<AnnealOptions> anneal;

    void validate() const;
};

enum class StopReason { grad_tol, max_iters, step_failure };

struct MinimizeReport {
    double final_energy = 0.0;  // unscaled objective value
    double scaled_energy = 0.0;
    int iterations = 0;
    bool converged = false;
    double grad_norm = 0.0;
    StopReason stop = StopReason::max_iters;
    EnergyBreakdown breakdown;
};

/// Riemannian gradient of the scaled objective, one tangent vector per site.
/// free: chain energy; soft: chain energy + penalty; hard: gradient within
/// the circle parametrization, returned along the per-site circle tangent.
std::vector<Vec3> gradient(const SpinChain& chain, const ModelParams& p,
                           const MinimizeMode& mode);

/// Projected gradient descent with renormalization retraction and
/// backtracking Armijo line search (factor 0.5, c = 1e-4); steps are seeded
/// by a safeguarded Barzilai-Borwein estimate. Accepted steps strictly
/// decrease the energy. The periodic scalar-product boundary is restored by
/// projection after every step; PinnedChirality (or pin_ends) freezes the
/// first two and last two spins. Hard mode dispatches to minimize_hard.
std::pair<SpinChain, MinimizeReport> minimize_chain(SpinChain chain, const ModelParams& p,
                                                    const MinimizeOptions& options);

/// Minimization constrained to the circle set M_k: each spin is
/// u^i = R_{l_i}(cos t_i, sin t_i, 0), optimized over the angles with greedy
/// label reassignment at sites near circle intersections. Output stays in
/// M_k exactly by parametrization. Throws ConstraintError for inits off M_k.
std::pair<SpinChain, MinimizeReport> minimize_hard(SpinChain chain, const ModelParams& p,
                                                   const PenaltySpec& pen,
                                                   const MinimizeOptions& options);

/// 2D minimization of the renormalized energy plus the delta^2-weighted
/// penalty. pin_ends freezes the two leftmost and two rightmost columns.
std::pair<SpinField2D, MinimizeReport> minimize_2d(SpinField2D field, const ModelParams& p,
                                                   const PenaltySpec& pen,
                                                   const MinimizeOptions& options);

/// Metropolis preconditioner over single-spin moves with a geometric
/// temperature schedule; returns the best configuration seen. Temperature 0
/// degenerates to pure local descent. Bit-reproducible for a fixed seed.
SpinChain anneal(SpinChain chain, const ModelParams& p, const MinimizeOptions& options);

/// Test/benchmark helper: tilt every spin by up to `angle` radians in a
/// seeded random tangent direction.
SpinChain perturbed(const SpinChain& chain, double angle, std::uint64_t seed);

}  // namespace chiralab
