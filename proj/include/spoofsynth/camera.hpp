#pragma once

#include <cmath>
#include <vector>

#include "spoofsynth/error.hpp"
#include "spoofsynth/geometry.hpp"
#include "spoofsynth/mesher.hpp"

namespace spoofsynth {

/// Capture calibration. Distances in mm, focal length in px.
struct CameraModel {
    double focal_px = 0.0;
    double depth_mm = 400.0;
    double eye_distance_mm = 63.0;
    double pixel_scale = 1.0; // px per mm
};

/// Image-to-world scale from the pixel and physical inter-eye distances.
inline double pixel_scale(double eye_distance_px, double eye_distance_mm)
{
    if (!(eye_distance_px > 0.0) || !(eye_distance_mm > 0.0)) {
        fail(ErrorKind::NonPositiveDistance, "eye distances must be positive");
    }
    return eye_distance_px / eye_distance_mm;
}

/// Mesh vertices after projection; depths are kept for the Z-buffer.
struct ProjectedMesh {
    std::vector<Vec2> points;
    std::vector<double> depths;
    std::vector<Vec2> uvs;
    std::vector<Triangle> triangles;
    GridDims grid;

    std::array<Vec2, 4> grid_corners() const noexcept
    {
        const auto cols = static_cast<std::size_t>(grid.columns);
        const auto rows = static_cast<std::size_t>(grid.rows);
        return {points[0], points[cols - 1], points[rows * cols - 1], points[(rows - 1) * cols]};
    }

    /// Shift all 2D points, e.g. to place the principal point in image space.
    ProjectedMesh translated(Vec2 offset) const
    {
        ProjectedMesh out = *this;
        for (Vec2& p : out.points) {
            p = p + offset;
        }
        return out;
    }
};

/// Scale object units to mm (1/s) and place the centroid on the optical
/// axis at depth `depth_mm`.
inline Mesh3D to_world(const Mesh3D& mesh, double scale, double depth_mm)
{
    if (!(scale > 0.0) || !(depth_mm > 0.0)) {
        fail(ErrorKind::NonPositiveDistance, "scale and depth must be positive");
    }
    const Vec3 c = mesh.centroid();
    const double inv = 1.0 / scale;
    Mesh3D out = mesh;
    for (Vec3& v : out.vertices) {
        v = (v - c) * inv + Vec3{0.0, 0.0, depth_mm};
    }
    out.extent = {mesh.extent.width * inv, mesh.extent.height * inv};
    return out;
}

namespace detail {

inline ProjectedMesh project_with(const Mesh3D& mesh, double focal_px, auto&& depth_of)
{
    if (!(focal_px > 0.0)) {
        fail(ErrorKind::NonPositiveDistance, "focal length must be positive");
    }
    ProjectedMesh out;
    out.points.reserve(mesh.vertices.size());
    out.depths.reserve(mesh.vertices.size());
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        const Vec3& v = mesh.vertices[i];
        if (!(v.z > 0.0)) {
            fail(ErrorKind::BehindCamera, "vertex " + std::to_string(i) + " is not in front of the camera");
        }
        const double k = focal_px / depth_of(v);
        out.points.push_back({v.x * k, v.y * k});
        out.depths.push_back(v.z);
    }
    out.uvs = mesh.uvs;
    out.triangles = mesh.triangles;
    out.grid = mesh.grid;
    return out;
}

} // namespace detail

/// Pinhole projection with each vertex divided by its own depth.
inline ProjectedMesh project_perspective(const Mesh3D& mesh, double focal_px)
{
    return detail::project_with(mesh, focal_px, [](const Vec3& v) { return v.z; });
}

/// Mean vertex depth, exact when all depths are equal.
inline double mean_depth(const Mesh3D& mesh) noexcept
{
    if (mesh.vertices.empty()) {
        return 0.0;
    }
    const double base = mesh.vertices.front().z;
    double offset = 0.0;
    for (const Vec3& v : mesh.vertices) {
        offset += v.z - base;
    }
    return base + offset / static_cast<double>(mesh.vertices.size());
}

/// Uniform scaling by one shared mean depth.
inline ProjectedMesh project_weak(const Mesh3D& mesh, double focal_px)
{
    const double d = mean_depth(mesh);
    if (!(d > 0.0)) {
        fail(ErrorKind::BehindCamera, "mean depth is not in front of the camera");
    }
    return detail::project_with(mesh, focal_px, [d](const Vec3&) { return d; });
}

} // namespace spoofsynth
