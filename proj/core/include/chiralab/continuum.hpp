#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "chiralab/penalty.hpp"
#include "chiralab/profiles.hpp"

namespace chiralab {

/// Transition problem between chirality values q_minus and q_plus:
/// minimize  int (|w|^2-1)^2 [+ G(w)/2]  dt + int |w'|^2 dt  over lifts
/// u with w = u x u'. A present penalty makes it the soft problem h_G;
/// otherwise the constraint flag selects the free (g) or circle-constrained
/// (h_k) variant.
struct ProfileProblem {
    enum class Constraint { FreeS2, HardMk };

    Vec3 q_minus, q_plus;
    std::optional<PenaltySpec> pen;
    Constraint constraint = Constraint::FreeS2;
    double t_span = 20.0;
    double h = 5e-3;

    void validate() const;
};

struct SolveOptions {
    int max_iters = 6000;
    double grad_tol = 1e-8;  // sup-norm of the projected gradient
    std::vector<std::uint64_t> seeds = {1, 2, 3};
};

struct SolveResult {
    ContinuumProfile profile;
    double energy = 0.0;
    bool converged = false;
    int iterations = 0;
    double grad_norm = 0.0;
    std::uint64_t best_seed = 0;
};

/// Quadrature of the transition integrand over a sampled profile: trapezoid
/// for the well (and optional G/2) part, the piecewise-linear Dirichlet sum
/// for the gradient part. Second order, and exact-kink-safe at nodes where
/// w vanishes.
double continuum_energy(const ContinuumProfile& profile, const PenaltySpec* pen = nullptr);

/// Gradient descent over the discretized lift u (the w = u x u' constraint
/// holds by construction). Tail windows of length 2 are clamped to pure
/// rotations about q_minus / q_plus; initialization comes from the analytic
/// transition profiles, multi-started over the option seeds, best kept.
SolveResult solve_profile(const ProfileProblem& problem, const SolveOptions& options = {});

/// Table of solved soft transition costs h_G(q, q') over the signed axis set,
/// ordered q_1..q_k, -q_1..-q_k. Diagonal entries are zero.
struct HgTable {
    std::vector<Vec3> axes;            // signed axes, 2k of them
    std::vector<std::vector<double>> value;
    std::vector<std::vector<bool>> asym_flag;  // |h(a,b)-h(b,a)| > 2% of max
    double max_entry = 0.0;
};

/// Pairs solve independently on a small task pool; the result does not
/// depend on the thread count.
HgTable h_g_table(const PenaltySpec& pen, const SolveOptions& options = {},
                  double t_span = 20.0, double h = 5e-3, int threads = 1);

}  // namespace chiralab
