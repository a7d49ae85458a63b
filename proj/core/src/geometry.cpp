#include "chiralab/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace chiralab {

double safe_acos(double c) { return std::acos(std::clamp(c, -1.0, 1.0)); }

Rotation Rotation::axis_angle(const Vec3& axis, double angle) {
    double n = axis.norm();
    if (n < 1e-14) throw ParameterError("rotation axis must be nonzero");
    Vec3 a = axis / n;
    double c = std::cos(angle), s = std::sin(angle), v = 1.0 - c;
    Mat3 m{{c + v * a.x * a.x, v * a.x * a.y - s * a.z, v * a.x * a.z + s * a.y,
            v * a.y * a.x + s * a.z, c + v * a.y * a.y, v * a.y * a.z - s * a.x,
            v * a.z * a.x - s * a.y, v * a.z * a.y + s * a.x, c + v * a.z * a.z}};
    return Rotation(m, a, angle);
}

Rotation Rotation::between(const Vec3& a, const Vec3& b) {
    double c = std::clamp(a.dot(b), -1.0, 1.0);
    if (c > 1.0 - 1e-14) return identity();
    if (c < -1.0 + 1e-14) {
        Vec3 ax = kE1 - a * a.dot(kE1);
        if (std::abs(a.dot(kE1)) > 0.9) ax = kE2 - a * a.dot(kE2);
        return axis_angle(ax.normalized(), M_PI);
    }
    Vec3 ax = a.cross(b);
    double s = ax.norm();
    return axis_angle(ax / s, std::atan2(s, c));
}

Rotation Rotation::operator*(const Rotation& o) const {
    Mat3 m = mat_ * o.mat_;
    Rotation r(m, kE1, 0.0);
    auto [ax, an] = axis_angle_of(r);
    return Rotation(m, ax, an);
}

Rotation Rotation::transposed() const { return Rotation(mat_.transposed(), axis_, -angle_); }

double Rotation::orthogonality_defect() const {
    Mat3 g = mat_.transposed() * mat_;
    double worst = std::abs(mat_.det() - 1.0);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) worst = std::max(worst, std::abs(g(i, j) - (i == j ? 1.0 : 0.0)));
    return worst;
}

std::pair<Vec3, double> axis_angle_of(const Rotation& r) {
    const Mat3& m = r.matrix();
    double c = std::clamp((m.trace() - 1.0) / 2.0, -1.0, 1.0);
    double angle = std::acos(c);
    Vec3 skew{m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1)};
    double s = skew.norm();
    if (s > 1e-9) return {skew / s, angle};
    if (c > 0) return {kE1, 0.0};
    // angle ~ pi: axis from the dominant diagonal of (M + I)/2
    Vec3 ax{std::sqrt(std::max(0.0, (m(0, 0) + 1) / 2)), std::sqrt(std::max(0.0, (m(1, 1) + 1) / 2)),
            std::sqrt(std::max(0.0, (m(2, 2) + 1) / 2))};
    // fix signs against off-diagonals
    if (ax.x >= ax.y && ax.x >= ax.z) {
        ax.y = std::copysign(ax.y, m(0, 1));
        ax.z = std::copysign(ax.z, m(0, 2));
    } else if (ax.y >= ax.z) {
        ax.x = std::copysign(ax.x, m(0, 1));
        ax.z = std::copysign(ax.z, m(1, 2));
    } else {
        ax.x = std::copysign(ax.x, m(0, 2));
        ax.y = std::copysign(ax.y, m(1, 2));
    }
    return {ax.normalized(), angle};
}

double SpinChain::renormalize() {
    double worst = 0.0;
    for (auto& u : spins) {
        worst = std::max(worst, std::abs(u.norm() - 1.0));
        u = u.normalized();
    }
    return worst;
}

double SpinChain::max_norm_drift() const {
    double worst = 0.0;
    for (const auto& u : spins) worst = std::max(worst, std::abs(u.norm() - 1.0));
    return worst;
}

double SpinChain::boundary_residual() const {
    if (spins.size() < 3) return 0.0;
    std::size_t n = spins.size();
    return std::abs(spins[1].dot(spins[0]) - spins[n - 1].dot(spins[n - 2]));
}

void SpinChain::validate(double boundary_tol) const {
    if (spins.size() < 3) throw DimensionError("chain needs at least 3 spins");
    if (max_norm_drift() > 1e-12) throw ConstraintError("chain spin norm drift exceeds 1e-12");
    if (boundary.mode == BoundaryMode::PeriodicScalarProduct && boundary_residual() > boundary_tol)
        throw ConstraintError("periodic scalar-product boundary violated");
}

double SpinField2D::renormalize() {
    double worst = 0.0;
    for (auto& u : spins) {
        worst = std::max(worst, std::abs(u.norm() - 1.0));
        u = u.normalized();
    }
    return worst;
}

double SpinField2D::boundary_residual() const {
    if (width < 3) return 0.0;
    double worst = 0.0;
    for (std::size_t iy = 0; iy < height; ++iy) {
        double left = at(1, iy).dot(at(0, iy));
        double right = at(width - 1, iy).dot(at(width - 2, iy));
        worst = std::max(worst, std::abs(left - right));
    }
    return worst;
}

void SpinField2D::validate(double boundary_tol) const {
    if (spins.size() != width * height) throw DimensionError("2d field storage/dims mismatch");
    for (const auto& u : spins)
        if (std::abs(u.norm() - 1.0) > 1e-12) throw ConstraintError("2d field spin norm drift");
    if (row_periodic && boundary_residual() > boundary_tol)
        throw ConstraintError("per-row scalar-product boundary violated");
}

Vec3 ChiralityField::mean() const {
    KahanSum sx, sy, sz;
    for (const auto& v : values) {
        sx.add(v.x);
        sy.add(v.y);
        sz.add(v.z);
    }
    double n = values.empty() ? 1.0 : static_cast<double>(values.size());
    return {sx.value() / n, sy.value() / n, sz.value() / n};
}

double ChiralityField::mean_norm() const {
    KahanSum s;
    for (const auto& v : values) s.add(v.norm());
    return values.empty() ? 0.0 : s.value() / static_cast<double>(values.size());
}

double ChiralityField::max_norm() const {
    double worst = 0.0;
    for (const auto& v : values) worst = std::max(worst, v.norm());
    return worst;
}

ChiralityField chirality(const SpinChain& chain, double delta) {
    if (!(delta > 0.0)) throw ParameterError("chirality needs delta > 0");
    ChiralityField out;
    out.delta = delta;
    double inv = 1.0 / std::sqrt(2.0 * delta);
    out.values.reserve(chain.size() > 0 ? chain.size() - 1 : 0);
    for (std::size_t i = 0; i + 1 < chain.size(); ++i)
        out.values.push_back(chain.spins[i].cross(chain.spins[i + 1]) * inv);
    return out;
}

std::vector<double> angles(const SpinChain& chain) {
    std::vector<double> out;
    out.reserve(chain.size() > 0 ? chain.size() - 1 : 0);
    for (std::size_t i = 0; i + 1 < chain.size(); ++i)
        out.push_back(safe_acos(chain.spins[i].dot(chain.spins[i + 1])));
    return out;
}

std::vector<Vec3> cross_field(const SpinChain& chain) {
    std::vector<Vec3> out;
    out.reserve(chain.size() > 0 ? chain.size() - 1 : 0);
    for (std::size_t i = 0; i + 1 < chain.size(); ++i)
        out.push_back(chain.spins[i].cross(chain.spins[i + 1]));
    return out;
}

SpinChain rotated(const SpinChain& chain, const Rotation& r) {
    SpinChain out = chain;
    for (auto& u : out.spins) u = r * u;
    return out;
}

}  // namespace chiralab
