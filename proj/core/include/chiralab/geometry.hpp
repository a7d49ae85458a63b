#pragma once

#include <optional>
#include <vector>

#include "chiralab/errors.hpp"
#include "chiralab/vec.hpp"

namespace chiralab {

/// Clamp to [-1,1] before acos. Inner products of unit vectors drift past 1
/// by rounding, which acos turns into NaN.
double safe_acos(double c);

/// Proper rotation, stored as a 3x3 matrix together with its axis-angle form.
class Rotation {
  public:
    Rotation() : mat_(Mat3::identity()), axis_(kE1), angle_(0.0) {}

    /// Rodrigues formula: rotation by `angle` about the unit vector `axis`.
    /// This is exp of the antisymmetric matrix angle*skew(axis).
    static Rotation axis_angle(const Vec3& axis, double angle);

    /// Minimal-angle rotation mapping unit vector a to unit vector b.
    /// a == b gives the identity. For a == -b the axis is the normalized
    /// component of e1 orthogonal to a (e2 when |(a,e1)| > 0.9), so the
    /// antipodal branch is deterministic.
    static Rotation between(const Vec3& a, const Vec3& b);

    static Rotation identity() { return Rotation(); }

    Vec3 operator*(const Vec3& v) const { return mat_ * v; }
    Rotation operator*(const Rotation& o) const;
    Rotation transposed() const;

    const Mat3& matrix() const { return mat_; }
    const Vec3& axis() const { return axis_; }
    double angle() const { return angle_; }

    /// max |R^T R - I| entry and |det - 1|, for the orthogonality invariant.
    double orthogonality_defect() const;

  private:
    Rotation(const Mat3& m, const Vec3& ax, double an) : mat_(m), axis_(ax), angle_(an) {}
    Mat3 mat_;
    Vec3 axis_;
    double angle_;
};

enum class BoundaryMode {
    Free,
    PeriodicScalarProduct,  // (u^1,u^0) = (u^{N-1},u^{N-2})
    PinnedChirality,        // first/last chirality vectors held fixed
};

struct Boundary {
    BoundaryMode mode = BoundaryMode::Free;
    Vec3 pin_left{};   // chirality pin at the left end (PinnedChirality only)
    Vec3 pin_right{};  // chirality pin at the right end

    static Boundary free() { return {}; }
    static Boundary periodic() { return {BoundaryMode::PeriodicScalarProduct, {}, {}}; }
    static Boundary pinned(const Vec3& left, const Vec3& right) {
        return {BoundaryMode::PinnedChirality, left, right};
    }
};

/// Finite chain of unit spins u^0..u^{N-1} on the lattice {spacing * i}.
/// Stored flat and contiguous; index i sits at x = spacing*i.
struct SpinChain {
    std::vector<Vec3> spins;
    double spacing = 0.0;
    Boundary boundary;

    std::size_t size() const { return spins.size(); }

    /// Renormalize every spin. Returns the largest norm drift found before
    /// renormalization (diagnostic; drift is not an error).
    double renormalize();

    /// Largest |1 - |u^i|| over the chain.
    double max_norm_drift() const;

    /// |(u^1,u^0) - (u^{N-1},u^{N-2})|; the periodic boundary residual.
    double boundary_residual() const;

    /// Checks unit norms (1e-12), N >= 3, and the periodic boundary identity
    /// when that mode is set. Throws on violation.
    void validate(double boundary_tol = 1e-12) const;
};

/// 2D grid of unit spins, row-major: site (ix, iy) at index iy*width + ix.
struct SpinField2D {
    std::vector<Vec3> spins;
    std::size_t width = 0, height = 0;
    double spacing = 0.0;
    bool row_periodic = false;  // per-row scalar-product periodicity

    Vec3& at(std::size_t ix, std::size_t iy) { return spins[iy * width + ix]; }
    const Vec3& at(std::size_t ix, std::size_t iy) const { return spins[iy * width + ix]; }

    double renormalize();
    /// Largest per-row periodic boundary residual.
    double boundary_residual() const;
    void validate(double boundary_tol = 1e-12) const;
};

/// Rescaled angular velocity z^i = (u^i x u^{i+1}) / sqrt(2*delta),
/// one value per consecutive pair.
struct ChiralityField {
    std::vector<Vec3> values;
    double delta = 0.0;

    std::size_t size() const { return values.size(); }

    Vec3 mean() const;
    double mean_norm() const;
    double max_norm() const;
};

/// Chirality order parameter of a chain. delta must be positive.
ChiralityField chirality(const SpinChain& chain, double delta);

/// Angles theta^i = arccos((u^i, u^{i+1})) in [0, pi], length N-1.
std::vector<double> angles(const SpinChain& chain);

/// Raw cross products w^i = u^i x u^{i+1}, length N-1.
std::vector<Vec3> cross_field(const SpinChain& chain);

inline Rotation rotation_exp(const Vec3& axis, double angle) {
    return Rotation::axis_angle(axis, angle);
}
inline Rotation rotation_between(const Vec3& a, const Vec3& b) { return Rotation::between(a, b); }

/// Axis-angle extraction (principal log). Antipodal-ish rotations (angle near
/// pi) resolve the axis from the symmetric part.
std::pair<Vec3, double> axis_angle_of(const Rotation& r);

/// Apply a global rotation to every spin.
SpinChain rotated(const SpinChain& chain, const Rotation& r);

}  // namespace chiralab
