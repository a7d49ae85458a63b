#pragma once

#include <functional>
#include <vector>

#include "chiralab/errors.hpp"
#include "chiralab/vec.hpp"

namespace chiralab {

/// Axis set Q_k = {+-q_1,...,+-q_k} together with a zero-homogeneous penalty
/// G >= 0 whose zero set is the union of the axis lines L_k. The builtin G is
/// the chordal distance of z/|z| to Q_k on the sphere, extended by G(0) = 0.
/// Directions closer to the origin than `deadband` count as zero.
class PenaltySpec {
  public:
    using Fn = std::function<double(const Vec3& direction)>;  // unit-direction penalty

    /// Builtin dist-to-Q_k, optionally scaled by a positive factor.
    static PenaltySpec dist_to_axes(std::vector<Vec3> axes, double scale = 1.0);

    /// User-supplied zero-homogeneous penalty of the normalized direction.
    /// The gradient falls back to central differences on the sphere.
    static PenaltySpec custom(std::vector<Vec3> axes, Fn g_of_direction);

    std::size_t k() const { return axes_.size(); }
    const std::vector<Vec3>& axes() const { return axes_; }

    /// All 2k signed axes, ordered q_1..q_k, -q_1..-q_k.
    std::vector<Vec3> signed_axes() const;

    double operator()(const Vec3& z) const;
    /// Euclidean gradient of G at z (0 on the zero set and inside the deadband;
    /// one-sided selection at ties).
    Vec3 gradient(const Vec3& z) const;

    /// Chordal distance of a unit vector to the circle set M_k = union of
    /// great circles orthogonal to the axes.
    double distance_to_circles(const Vec3& u) const;
    /// Index of the nearest circle for a unit vector.
    std::size_t nearest_circle(const Vec3& u) const;
    /// Unit intersection directions of circles l and m (+-(q_l x q_m)^).
    std::pair<Vec3, Vec3> circle_intersections(std::size_t l, std::size_t m) const;

    bool is_builtin() const { return !custom_; }
    double scale() const { return scale_; }

    static constexpr double kDeadband = 1e-8;

  private:
    PenaltySpec(std::vector<Vec3> axes, double scale, Fn fn);
    std::vector<Vec3> axes_;
    double scale_ = 1.0;
    Fn custom_;  // empty => builtin
};

}  // namespace chiralab
