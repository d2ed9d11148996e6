#pragma once

#include <cmath>
#include <numbers>

#include "spoofsynth/error.hpp"
#include "spoofsynth/geometry.hpp"
#include "spoofsynth/mesher.hpp"

namespace spoofsynth {

enum class BendAxis { Vertical, Horizontal };

struct BendSpec {
    BendAxis axis = BendAxis::Vertical;
    double theta = 0.0; // radians, in (0, 2*pi)
};

struct RotationSpec {
    double yaw = 0.0;   // about y
    double pitch = 0.0; // about x
    double roll = 0.0;  // about z
};

struct BendOptions {
    /// Permit bending a surface that already has depth (second axis of a
    /// two-axis bend). The new bulge is added to the existing z.
    bool allow_nonplanar = false;
};

namespace detail {

inline void check_theta(double theta)
{
    if (!(theta > 0.0) || !(theta < 2.0 * std::numbers::pi)) {
        fail(ErrorKind::InvalidTheta, "bending angle must lie in (0, 2*pi)");
    }
}

inline void check_planar(const Mesh3D& mesh)
{
    const double tol = 1e-9 * std::max(mesh.extent.width, mesh.extent.height);
    for (const Vec3& v : mesh.vertices) {
        if (std::abs(v.z) > tol) {
            fail(ErrorKind::NotPlanar, "mesh already has depth; enable allow_nonplanar to stack bends");
        }
    }
}

/// Wraps the coordinate t in [0, length] onto an arc of angle theta and
/// radius length/theta. Returns (arc abscissa centred at 0, bulge depth);
/// the ends of the sheet stay at depth 0.
inline Vec2 wrap_on_cylinder(double t, double length, double theta) noexcept
{
    const double radius = length / theta;
    const double phi = (t - 0.5 * length) / length * theta;
    const double half = 0.5 * theta;
    // cos(phi) - cos(half) as a product of sines: no cancellation near flat.
    const double depth = 2.0 * radius * std::sin(0.5 * (half + phi)) * std::sin(0.5 * (half - phi));
    return {radius * std::sin(phi), depth};
}

} // namespace detail

/// Roll the sheet around a vertical cylinder axis: x wraps onto the arc,
/// y is untouched.
inline Mesh3D bend_vertical(const Mesh3D& mesh, double theta, BendOptions options = {})
{
    detail::check_theta(theta);
    if (!options.allow_nonplanar) {
        detail::check_planar(mesh);
    }
    Mesh3D out = mesh;
    const double l = mesh.extent.width;
    for (Vec3& v : out.vertices) {
        const Vec2 w = detail::wrap_on_cylinder(v.x, l, theta);
        v.x = w.x;
        v.z += w.y;
    }
    return out;
}

/// Same as bend_vertical with the roles of x/width and y/height exchanged.
inline Mesh3D bend_horizontal(const Mesh3D& mesh, double theta, BendOptions options = {})
{
    detail::check_theta(theta);
    if (!options.allow_nonplanar) {
        detail::check_planar(mesh);
    }
    Mesh3D out = mesh;
    const double h = mesh.extent.height;
    for (Vec3& v : out.vertices) {
        const Vec2 w = detail::wrap_on_cylinder(v.y, h, theta);
        v.y = w.x;
        v.z += w.y;
    }
    return out;
}

inline Mesh3D bend(const Mesh3D& mesh, const BendSpec& spec, BendOptions options = {})
{
    return spec.axis == BendAxis::Vertical ? bend_vertical(mesh, spec.theta, options)
                                           : bend_horizontal(mesh, spec.theta, options);
}

/// R = R_yaw * R_pitch * R_roll in a right-handed frame with x right, y down
/// and z toward the camera.
inline Mat3 rotation_matrix(const RotationSpec& rot) noexcept
{
    const double cy = std::cos(rot.yaw), sy = std::sin(rot.yaw);
    const double cp = std::cos(rot.pitch), sp = std::sin(rot.pitch);
    const double cr = std::cos(rot.roll), sr = std::sin(rot.roll);
    Mat3 yaw{{cy, 0, sy, 0, 1, 0, -sy, 0, cy}};
    Mat3 pitch{{1, 0, 0, 0, cp, -sp, 0, sp, cp}};
    Mat3 roll{{cr, -sr, 0, sr, cr, 0, 0, 0, 1}};
    return yaw * pitch * roll;
}

/// Rigid rotation about the mesh centroid.
inline Mesh3D rotate(const Mesh3D& mesh, const RotationSpec& rot)
{
    if (!std::isfinite(rot.yaw) || !std::isfinite(rot.pitch) || !std::isfinite(rot.roll)) {
        fail(ErrorKind::InvalidInput, "rotation angles must be finite");
    }
    if (rot.yaw == 0.0 && rot.pitch == 0.0 && rot.roll == 0.0) {
        return mesh;
    }
    const Mat3 r = rotation_matrix(rot);
    const Vec3 c = mesh.centroid();
    Mesh3D out = mesh;
    for (Vec3& v : out.vertices) {
        v = r * (v - c) + c;
    }
    return out;
}

} // namespace spoofsynth
