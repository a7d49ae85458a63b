#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "chiralab/energies.hpp"
#include "chiralab/geometry.hpp"
#include "chiralab/penalty.hpp"

namespace chiralab {

/// C^2 cutoff ramp on [0,1] with value, first and second derivative.
/// Outside [0,1] the value is clamped to 0/1 and the derivatives vanish.
struct CutoffRamp {
    std::function<double(double)> f, df, d2f;

    /// The quintic 10 s^3 - 15 s^4 + 6 s^5; closed-form derivative bounds.
    static CutoffRamp quintic();
};

/// Sampled continuum path u(t) on a uniform grid, with the angular-velocity
/// field w = u x u'. Constructors with a closed form install exact evaluators
/// alongside the samples; sampling and quadrature prefer those.
struct ContinuumProfile {
    double t_lo = 0.0;
    double dt = 0.0;
    std::vector<Vec3> u;
    std::vector<Vec3> w;
    std::function<Vec3(double)> u_exact;  // optional
    std::function<Vec3(double)> w_exact;  // optional

    std::size_t size() const { return u.size(); }
    double t_hi() const { return t_lo + dt * (u.empty() ? 0 : u.size() - 1); }
    double t_at(std::size_t j) const { return t_lo + dt * static_cast<double>(j); }

    /// u(t): exact evaluator when present, else normalized linear
    /// interpolation of the samples (throws ParameterError out of range).
    Vec3 eval_u(double t) const;

    /// Build from samples only; w is filled by second-order finite
    /// differences (central in the interior, one-sided at the ends).
    static ContinuumProfile from_samples(double t_lo, double dt, std::vector<Vec3> u);

    /// Finite-difference w from the stored u samples (the same scheme
    /// from_samples uses); used to cross-check stored analytic w.
    std::vector<Vec3> finite_difference_w() const;
};

/// Ground helix: u^i = R (cos(phi i), sin(phi i), 0) with cos(phi) = 1-delta.
/// Satisfies the periodic scalar-product boundary and has zero renormalized
/// energy by construction.
SpinChain ground_helix(double delta, const Rotation& axis_rotation, std::size_t n_sites,
                       double lambda);

/// Rotating-axis transition: u(t) = exp(ramp(t/rho) B) (cos t, sin t, 0) in
/// the frame of z1, where exp(B) maps z1 to z2. w equals z1 for t <= 0 and z2
/// for t >= rho exactly; the transition energy decays like 1/rho.
ContinuumProfile zero_cost_profile(const Vec3& z1, const Vec3& z2, double rho,
                                   const CutoffRamp& ramp = CutoffRamp::quintic());

/// Optimal two-circle transition: w = |tanh(t)| q_- for t <= 0 and
/// |tanh(t)| q_+ for t > 0, lifted through gamma(t) = log cosh(t). The lift
/// passes through an intersection of the two circles at t = 0; its full
/// continuum energy is 8/3.
ContinuumProfile tanh_profile(const Vec3& q_minus, const Vec3& q_plus, double t_span,
                              double dt = 1e-3);

/// Finite-ramp variant: odd C^1 speed f equal to tanh on [0,t_eps], a cubic
/// Hermite bridge on (t_eps, t_eps+eps), and exactly 1 afterwards, with
/// |bridge'| <= 2. Energy is 8/3 + O(eps).
ContinuumProfile soft_profile(const Vec3& q1, const Vec3& q2, double eps);

/// C^2 three-segment connector between the states (u0, w0) and (u1, w1),
/// both with w within eta of a common unit axis: speed ramp, axis rotation,
/// speed ramp plus phase alignment. Duration at most 3 + 4 pi; energy -> 0
/// as eta -> 0.
ContinuumProfile bridge(const Vec3& w0, const Vec3& w1, const Vec3& u0, const Vec3& u1,
                        double eta);

/// Lattice sampling of a continuum path:
///   u_n^i = u( alpha_n sqrt(2 delta)/lambda (lambda i - center) )
/// over the sites covering [0,1]. Where both tails are pure rotations the
/// result satisfies the periodic scalar-product boundary, which is detected
/// and tagged on the returned chain.
SpinChain sample_chain(const ContinuumProfile& profile, double lambda, double delta,
                       double center = 0.5);

/// Chain whose chirality oscillates between +-e3 with period 2*eta while
/// |z| stays near 1 (weak-but-not-strong convergence demonstration). The
/// axis is carried around by a smooth rotating-frame ramp each half period,
/// so the scaled energy stays small.
SpinChain oscillating_chain(double eta, const ModelParams& p);

}  // namespace chiralab
