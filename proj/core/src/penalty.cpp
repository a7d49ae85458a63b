#include "chiralab/penalty.hpp"

#include <algorithm>
#include <cmath>

namespace chiralab {

PenaltySpec::PenaltySpec(std::vector<Vec3> axes, double scale, Fn fn)
    : axes_(std::move(axes)), scale_(scale), custom_(std::move(fn)) {
    if (axes_.empty()) throw ParameterError("penalty needs at least one axis");
    for (auto& q : axes_) {
        if (q.norm() < 1e-9) throw ParameterError("penalty axis must be nonzero");
        q = q.normalized();
    }
    for (std::size_t l = 0; l < axes_.size(); ++l)
        for (std::size_t m = l + 1; m < axes_.size(); ++m) {
            double d = std::min((axes_[l] - axes_[m]).norm(), (axes_[l] + axes_[m]).norm());
            if (d < 1e-9) throw ParameterError("penalty axes must be pairwise distinct");
        }
    if (!(scale_ > 0.0)) throw ParameterError("penalty scale must be positive");
}

PenaltySpec PenaltySpec::dist_to_axes(std::vector<Vec3> axes, double scale) {
    return PenaltySpec(std::move(axes), scale, nullptr);
}

PenaltySpec PenaltySpec::custom(std::vector<Vec3> axes, Fn g) {
    if (!g) throw ParameterError("custom penalty needs a function");
    return PenaltySpec(std::move(axes), 1.0, std::move(g));
}

std::vector<Vec3> PenaltySpec::signed_axes() const {
    std::vector<Vec3> out = axes_;
    for (const auto& q : axes_) out.push_back(-q);
    return out;
}

double PenaltySpec::operator()(const Vec3& z) const {
    double n = z.norm();
    if (n < kDeadband) return 0.0;
    Vec3 d = z / n;
    if (custom_) return custom_(d);
    double best = 0.0;
    for (const auto& q : axes_) best = std::max(best, std::abs(d.dot(q)));
    best = std::min(best, 1.0);
    return scale_ * std::sqrt(std::max(0.0, 2.0 - 2.0 * best));
}

Vec3 PenaltySpec::gradient(const Vec3& z) const {
    double n = z.norm();
    if (n < kDeadband) return {};
    Vec3 d = z / n;
    if (custom_) {
        // central differences along two tangent directions
        Vec3 t1 = kE1 - d * d.x;
        if (t1.norm() < 0.1) t1 = kE2 - d * d.y;
        t1 = t1.normalized();
        Vec3 t2 = d.cross(t1);
        const double h = 1e-6;
        auto ev = [&](const Vec3& p) { return custom_(p.normalized()); };
        double g1 = (ev(d + t1 * h) - ev(d - t1 * h)) / (2 * h);
        double g2 = (ev(d + t2 * h) - ev(d - t2 * h)) / (2 * h);
        return (t1 * g1 + t2 * g2) / n;
    }
    std::size_t best_l = 0;
    double best = -1.0;
    for (std::size_t l = 0; l < axes_.size(); ++l) {
        double c = std::abs(d.dot(axes_[l]));
        if (c > best) {
            best = c;
            best_l = l;
        }
    }
    Vec3 q = axes_[best_l];
    if (d.dot(q) < 0) q = -q;
    double c = std::clamp(d.dot(q), -1.0, 1.0);
    double g = std::sqrt(std::max(0.0, 2.0 - 2.0 * c));
    if (g < 1e-9) return {};  // subgradient 0 on the zero set
    Vec3 q_tan = q - d * c;   // (I - dd^T) q
    return q_tan * (-scale_ / (g * n));
}

double PenaltySpec::distance_to_circles(const Vec3& u) const {
    double best = 2.0;
    for (const auto& q : axes_) {
        double c = std::clamp(u.dot(q), -1.0, 1.0);
        double d2 = 2.0 - 2.0 * std::sqrt(std::max(0.0, 1.0 - c * c));
        best = std::min(best, std::sqrt(std::max(0.0, d2)));
    }
    return best;
}

std::size_t PenaltySpec::nearest_circle(const Vec3& u) const {
    std::size_t best_l = 0;
    double best = 2.0;
    for (std::size_t l = 0; l < axes_.size(); ++l) {
        double c = std::abs(std::clamp(u.dot(axes_[l]), -1.0, 1.0));
        if (c < best) {
            best = c;
            best_l = l;
        }
    }
    return best_l;
}

std::pair<Vec3, Vec3> PenaltySpec::circle_intersections(std::size_t l, std::size_t m) const {
    Vec3 v = axes_[l].cross(axes_[m]);
    double n = v.norm();
    if (n < 1e-12) throw ParameterError("circles coincide; no transverse intersection");
    Vec3 x = v / n;
    return {x, -x};
}

}  // namespace chiralab
