#pragma once

#include "chiralab/geometry.hpp"
#include "chiralab/penalty.hpp"

namespace chiralab {

/// Scaling parameters of the model. j0 defaults to 4*(1-delta) (the coupling
/// at distance delta below the helimagnetic transition point).
struct ModelParams {
    double lambda = 0.0;  // lattice spacing
    double delta = 0.0;   // distance to the transition point, in [0,1)
    double j2 = 0.0;      // vertical ferromagnetic coupling
    double mu = 0.0;      // penalty weight
    double j0 = -1.0;     // horizontal NN coupling; < 0 means "use 4*(1-delta)"

    double j0_effective() const { return j0 < 0.0 ? 4.0 * (1.0 - delta) : j0; }

    /// arccos(1-delta)/sqrt(2 delta); -> 1 as delta -> 0.
    double alpha_n() const;
    /// lambda / sqrt(delta).
    double beta_n() const;
    /// mu / (sqrt(2) lambda delta^{3/2}).
    double p_n() const;
    /// sqrt(2) lambda delta^{3/2}, the transition energy scale.
    double energy_scale() const;

    void validate() const;
};

/// Decomposition of the scaled chain energy. Under the periodic
/// scalar-product boundary the split
///     total = well_term + cross_term
/// is exact, and the sandwich
///     well_term + (1-gamma)*gradient_term <= total <= well_term + gradient_term
/// holds whenever gamma_estimate = tan(max theta) < 1.
struct EnergyBreakdown {
    double total = 0.0;           // scaled energy
    double well_term = 0.0;       // (sqrt(2d)/l) sum l (|du/sqrt(2d)|^2-1)^2
    double gradient_term = 0.0;   // (l/sqrt(2d)) sum l |dz/l|^2
    double cross_term = 0.0;      // exact NNN remainder (rewrite of the energy)
    double penalty_term = 0.0;    // scaled penalty, when present
    double ferro_2d_term = 0.0;   // scaled vertical coupling, 2D runs only
    double gamma_estimate = 0.0;  // tan(max_i theta^i)

    bool sandwich_applicable() const { return gamma_estimate < 1.0; }
};

/// Renormalized chain energy
///   (1/2) sum_{i in R} lambda |u^{i+2} - 2(1-delta) u^{i+1} + u^i|^2
/// with R = {0..N-3}. Zero exactly on ground helices.
double chain_energy(const SpinChain& chain, const ModelParams& p);

/// chain_energy divided by the transition scale sqrt(2) lambda delta^{3/2}.
double chain_energy_scaled(const SpinChain& chain, const ModelParams& p);

/// Penalty sum mu * sum_{i in R} lambda G(u^i x u^{i+1}).
double penalty_energy(const SpinChain& chain, const ModelParams& p, const PenaltySpec& pen);

/// chain_energy + penalty_energy.
double penalized_chain_energy(const SpinChain& chain, const ModelParams& p,
                              const PenaltySpec& pen);

/// Membership tolerance for the hard circle constraint.
inline constexpr double kMembershipTol = 1e-9;

/// Chain energy under the hard constraint u in M_k. Every spin must lie on
/// one of the penalty circles within kMembershipTol; otherwise throws
/// ConstraintError naming the worst site.
double hard_chain_energy(const SpinChain& chain, const ModelParams& p, const PenaltySpec& pen);

/// Exact well/cross split plus the sandwich terms. Requires the periodic
/// scalar-product boundary mode (the shift identities use it).
EnergyBreakdown sandwich_decomposition(const SpinChain& chain, const ModelParams& p);

/// Same arithmetic without the boundary-mode precondition; the exact split and
/// the sandwich are then only guaranteed for periodic chains. Used for
/// reporting on arbitrary configurations.
EnergyBreakdown sandwich_terms_unchecked(const SpinChain& chain, const ModelParams& p);

/// Raw 2D Hamiltonian
///   - sum_{i in R} lambda^2 ( J0 (u_i,u_{i+e1}) - (u_i,u_{i+2e1}) + J2 (u_i,u_{i+e2}) )
/// over interior sites R = {(ix,iy) : ix+2 < W, iy+1 < H}.
double hamiltonian_2d(const SpinField2D& f, const ModelParams& p);

/// Renormalized nonnegative 2D energy; zero exactly on ground states.
double renormalized_2d(const SpinField2D& f, const ModelParams& p);

/// renormalized_2d plus the 2D penalty delta^2 sum lambda^2 G(u^i x u^{i+e1}).
/// Note the 2D penalty weight is delta^2, not mu.
double renormalized_2d_penalized(const SpinField2D& f, const ModelParams& p,
                                 const PenaltySpec& pen);

/// sum_{i in R} lambda^2 |u^{i+e2} - u^i|^2 (unweighted vertical variation).
double y_variation(const SpinField2D& f);

/// sum over the 2D interior index set of lambda^2; the paper's 1 - a_n.
double covered_area(const SpinField2D& f);

/// sum over the 1D interior index set of lambda; covered length.
double covered_length(const SpinChain& chain);

/// Closed-form ground energy -(1 + J0^2/8 + J2) * covered_area.
double ground_energy_2d(const SpinField2D& f, const ModelParams& p);

/// Monitors for the low-energy a-priori bounds:
///  angle_ratio      = max_i |(1-delta) - (u^{i+1},u^i)| / sqrt(mu_scale)
///  continuity_ratio = max_i |z^{i+1} - z^i|^2 / sqrt(delta)
struct CompactnessDiagnostic {
    double angle_ratio = 0.0;
    double continuity_ratio = 0.0;
};

CompactnessDiagnostic compactness_diagnostic(const SpinChain& chain, const ModelParams& p,
                                             double mu_scale);

}  // namespace chiralab
