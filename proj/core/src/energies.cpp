#include "chiralab/energies.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace chiralab {

double ModelParams::alpha_n() const {
    if (delta <= 0.0) return 1.0;  // limit value
    return safe_acos(1.0 - delta) / std::sqrt(2.0 * delta);
}

double ModelParams::beta_n() const {
    if (!(delta > 0.0)) throw ParameterError("beta_n needs delta > 0");
    return lambda / std::sqrt(delta);
}

double ModelParams::p_n() const {
    double s = energy_scale();
    return mu / s;
}

double ModelParams::energy_scale() const {
    if (!(delta > 0.0) || !(lambda > 0.0))
        throw ParameterError("energy scale needs lambda > 0 and delta > 0");
    return std::sqrt(2.0) * lambda * delta * std::sqrt(delta);
}

void ModelParams::validate() const {
    if (!(lambda > 0.0)) throw ParameterError("lambda must be positive");
    if (delta < 0.0 || delta >= 1.0) throw ParameterError("delta must lie in [0,1)");
    if (j2 < 0.0) throw ParameterError("j2 must be nonnegative");
    if (mu < 0.0) throw ParameterError("mu must be nonnegative");
}

double chain_energy(const SpinChain& chain, const ModelParams& p) {
    const auto& u = chain.spins;
    if (u.size() < 3) throw DimensionError("chain energy needs N >= 3");
    double b = 2.0 * (1.0 - p.delta);
    KahanSum s;
    for (std::size_t i = 0; i + 2 < u.size(); ++i) {
        Vec3 st = u[i + 2] - u[i + 1] * b + u[i];
        s.add(st.norm2());
    }
    return 0.5 * p.lambda * s.value();
}

double chain_energy_scaled(const SpinChain& chain, const ModelParams& p) {
    return chain_energy(chain, p) / p.energy_scale();
}

double penalty_energy(const SpinChain& chain, const ModelParams& p, const PenaltySpec& pen) {
    const auto& u = chain.spins;
    if (u.size() < 3) throw DimensionError("penalty energy needs N >= 3");
    KahanSum s;
    for (std::size_t i = 0; i + 2 < u.size(); ++i) s.add(pen(u[i].cross(u[i + 1])));
    return p.mu * p.lambda * s.value();
}

double penalized_chain_energy(const SpinChain& chain, const ModelParams& p,
                              const PenaltySpec& pen) {
    return chain_energy(chain, p) + penalty_energy(chain, p, pen);
}

double hard_chain_energy(const SpinChain& chain, const ModelParams& p, const PenaltySpec& pen) {
    double worst = 0.0;
    std::size_t worst_i = 0;
    for (std::size_t i = 0; i < chain.size(); ++i) {
        double d = pen.distance_to_circles(chain.spins[i]);
        if (d > worst) {
            worst = d;
            worst_i = i;
        }
    }
    if (worst > kMembershipTol)
        throw ConstraintError("spin " + std::to_string(worst_i) + " off the circle set M_k by " +
                              std::to_string(worst));
    return chain_energy(chain, p);
}

namespace {

EnergyBreakdown sandwich_impl(const SpinChain& chain, const ModelParams& p) {
    const auto& u = chain.spins;
    if (u.size() < 3) throw DimensionError("decomposition needs N >= 3");
    if (!(p.delta > 0.0)) throw ParameterError("decomposition needs delta > 0");
    const double two_d = 2.0 * p.delta;
    const double scale = p.energy_scale();

    KahanSum well, cross, grad;
    double max_theta = 0.0;
    for (std::size_t i = 0; i + 2 < u.size(); ++i) {
        double c1 = u[i].dot(u[i + 1]);
        double du2 = (u[i + 1] - u[i]).norm2();
        well.add((du2 / two_d - 1.0) * (du2 / two_d - 1.0));
        // 2 (1 - (u^{i+1},u^i)^2) - 1/2 |u^{i+2} - u^i|^2
        cross.add(2.0 * (1.0 - c1 * c1) - 0.5 * (u[i + 2] - u[i]).norm2());
        Vec3 dz = u[i + 1].cross(u[i + 2]) - u[i].cross(u[i + 1]);
        grad.add(dz.norm2());
    }
    for (std::size_t i = 0; i + 1 < u.size(); ++i)
        max_theta = std::max(max_theta, safe_acos(u[i].dot(u[i + 1])));

    EnergyBreakdown out;
    out.well_term = 2.0 * p.delta * p.delta * p.lambda * well.value() / scale;
    out.cross_term = p.lambda * cross.value() / scale;
    // gradient term: delta * sum lambda |z^{i+1}-z^i|^2, z = w/sqrt(2 delta)
    out.gradient_term = p.delta * p.lambda * (grad.value() / two_d) / scale;
    out.gamma_estimate = std::tan(std::min(max_theta, M_PI / 2 - 1e-12));
    out.total = chain_energy_scaled(chain, p);
    return out;
}

}  // namespace

EnergyBreakdown sandwich_decomposition(const SpinChain& chain, const ModelParams& p) {
    if (chain.boundary.mode != BoundaryMode::PeriodicScalarProduct)
        throw ParameterError("sandwich decomposition requires the periodic scalar-product boundary");
    return sandwich_impl(chain, p);
}

EnergyBreakdown sandwich_terms_unchecked(const SpinChain& chain, const ModelParams& p) {
    return sandwich_impl(chain, p);
}

double hamiltonian_2d(const SpinField2D& f, const ModelParams& p) {
    if (f.width < 3 || f.height < 2)
        throw DimensionError("2d energy needs width >= 3 and height >= 2");
    double j0 = p.j0_effective();
    double l2 = p.lambda * p.lambda;
    KahanSum s;
    for (std::size_t iy = 0; iy + 1 < f.height; ++iy)
        for (std::size_t ix = 0; ix + 2 < f.width; ++ix) {
            const Vec3& c = f.at(ix, iy);
            s.add(j0 * c.dot(f.at(ix + 1, iy)) - c.dot(f.at(ix + 2, iy)) +
                  p.j2 * c.dot(f.at(ix, iy + 1)));
        }
    return -l2 * s.value();
}

double renormalized_2d(const SpinField2D& f, const ModelParams& p) {
    if (f.width < 3 || f.height < 2)
        throw DimensionError("2d energy needs width >= 3 and height >= 2");
    double j0 = p.j0_effective();
    double l2 = p.lambda * p.lambda;
    KahanSum sx, sy;
    for (std::size_t iy = 0; iy + 1 < f.height; ++iy)
        for (std::size_t ix = 0; ix + 2 < f.width; ++ix) {
            Vec3 st = f.at(ix, iy) - f.at(ix + 1, iy) * (j0 / 2.0) + f.at(ix + 2, iy);
            sx.add(st.norm2());
            sy.add((f.at(ix, iy + 1) - f.at(ix, iy)).norm2());
        }
    return 0.5 * l2 * (sx.value() + p.j2 * sy.value());
}

double renormalized_2d_penalized(const SpinField2D& f, const ModelParams& p,
                                 const PenaltySpec& pen) {
    double base = renormalized_2d(f, p);
    double l2 = p.lambda * p.lambda;
    KahanSum s;
    for (std::size_t iy = 0; iy + 1 < f.height; ++iy)
        for (std::size_t ix = 0; ix + 2 < f.width; ++ix)
            s.add(pen(f.at(ix, iy).cross(f.at(ix + 1, iy))));
    return base + p.delta * p.delta * l2 * s.value();
}

double y_variation(const SpinField2D& f) {
    if (f.width < 3 || f.height < 2) return 0.0;
    double l2 = f.spacing * f.spacing;
    KahanSum s;
    for (std::size_t iy = 0; iy + 1 < f.height; ++iy)
        for (std::size_t ix = 0; ix + 2 < f.width; ++ix)
            s.add((f.at(ix, iy + 1) - f.at(ix, iy)).norm2());
    return l2 * s.value();
}

double covered_area(const SpinField2D& f) {
    if (f.width < 3 || f.height < 2) return 0.0;
    return static_cast<double>((f.width - 2) * (f.height - 1)) * f.spacing * f.spacing;
}

double covered_length(const SpinChain& chain) {
    if (chain.size() < 3) return 0.0;
    return static_cast<double>(chain.size() - 2) * chain.spacing;
}

double ground_energy_2d(const SpinField2D& f, const ModelParams& p) {
    double j0 = p.j0_effective();
    return -(1.0 + j0 * j0 / 8.0 + p.j2) * covered_area(f);
}

CompactnessDiagnostic compactness_diagnostic(const SpinChain& chain, const ModelParams& p,
                                             double mu_scale) {
    if (!(mu_scale > 0.0)) throw ParameterError("compactness diagnostic needs mu_scale > 0");
    const auto& u = chain.spins;
    double worst_angle = 0.0, worst_cont = 0.0;
    for (std::size_t i = 0; i + 1 < u.size(); ++i)
        worst_angle = std::max(worst_angle, std::abs((1.0 - p.delta) - u[i + 1].dot(u[i])));
    for (std::size_t i = 0; i + 2 < u.size(); ++i) {
        Vec3 dz = (u[i + 1].cross(u[i + 2]) - u[i].cross(u[i + 1])) / std::sqrt(2.0 * p.delta);
        worst_cont = std::max(worst_cont, dz.norm2());
    }
    return {worst_angle / std::sqrt(mu_scale), worst_cont / std::sqrt(p.delta)};
}

}  // namespace chiralab
