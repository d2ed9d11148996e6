#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "spoofsynth/error.hpp"
#include "spoofsynth/geometry.hpp"
#include "spoofsynth/image.hpp"

namespace spoofsynth {

/// Annotated printed-photo region: corners in source-image pixel
/// coordinates, ordered top-left, top-right, bottom-right, bottom-left.
class Quad {
public:
    explicit Quad(const std::array<Vec2, 4>& corners) : corners_(corners)
    {
        for (const Vec2& c : corners_) {
            if (!std::isfinite(c.x) || !std::isfinite(c.y)) {
                fail(ErrorKind::DegenerateQuad, "non-finite corner");
            }
        }
        for (std::size_t i = 0; i < 4; ++i) {
            for (std::size_t j = i + 1; j < 4; ++j) {
                if (norm(corners_[i] - corners_[j]) <= 1.0) {
                    fail(ErrorKind::DegenerateQuad,
                         "corners " + std::to_string(i) + " and " + std::to_string(j) + " are within 1 px");
                }
            }
        }
        // With y pointing down, TL -> TR -> BR -> BL turns the same way at
        // every corner exactly when the quad is strictly convex.
        for (std::size_t i = 0; i < 4; ++i) {
            if (!(cross(corners_[i], corners_[(i + 1) % 4], corners_[(i + 2) % 4]) > 0.0)) {
                fail(ErrorKind::DegenerateQuad, "corners are not a strictly convex TL,TR,BR,BL polygon");
            }
        }
    }

    const std::array<Vec2, 4>& corners() const noexcept { return corners_; }
    const Vec2& operator[](std::size_t i) const noexcept { return corners_[i]; }

    Vec2 centroid() const noexcept
    {
        return (corners_[0] + corners_[1] + corners_[2] + corners_[3]) * 0.25;
    }

    double area() const noexcept
    {
        double twice = 0.0;
        for (std::size_t i = 0; i < 4; ++i) {
            const Vec2 a = corners_[i];
            const Vec2 b = corners_[(i + 1) % 4];
            twice += a.x * b.y - b.x * a.y;
        }
        return 0.5 * twice;
    }

private:
    std::array<Vec2, 4> corners_;
};

struct TextureSize {
    int width = 0;
    int height = 0;
};

/// Rectified photo content; always at least 2x2.
class Texture {
public:
    explicit Texture(Image image) : image_(std::move(image))
    {
        if (image_.width() < 2 || image_.height() < 2) {
            fail(ErrorKind::EmptyOutput, "texture must be at least 2x2");
        }
    }

    const Image& image() const noexcept { return image_; }
    int width() const noexcept { return image_.width(); }
    int height() const noexcept { return image_.height(); }

    /// Bilinear sample at texture coordinates in [0,1]^2.
    RgbF sample_uv(Vec2 uv) const noexcept
    {
        return image_.sample({uv.x * image_.width(), uv.y * image_.height()});
    }

private:
    Image image_;
};

/// Rounded mean lengths of opposite quad edges.
inline TextureSize default_texture_size(const Quad& quad)
{
    const double w = 0.5 * (norm(quad[1] - quad[0]) + norm(quad[2] - quad[3]));
    const double h = 0.5 * (norm(quad[3] - quad[0]) + norm(quad[2] - quad[1]));
    return {static_cast<int>(std::lround(w)), static_cast<int>(std::lround(h))};
}

/// Resample the quad region of `image` into an axis-aligned texture through
/// the homography taking the unit square onto the quad.
inline Texture rectify_region(const Image& image, const Quad& quad, TextureSize size)
{
    if (size.width < 2 || size.height < 2) {
        fail(ErrorKind::EmptyOutput, "output texture must be at least 2x2");
    }
    if (image.empty()) {
        fail(ErrorKind::InvalidInput, "source image is empty");
    }
    const auto map = square_to_quad(std::span<const Vec2, 4>(quad.corners()));
    if (!map) {
        fail(ErrorKind::DegenerateQuad, "quad admits no homography");
    }
    const Homography h(*map);

    Image out(size.width, size.height);
    for (int ty = 0; ty < size.height; ++ty) {
        const double v = (ty + 0.5) / size.height;
        for (int tx = 0; tx < size.width; ++tx) {
            const double u = (tx + 0.5) / size.width;
            out.set(tx, ty, to_rgb(image.sample(h.apply({u, v}))));
        }
    }
    return Texture(std::move(out));
}

struct GridDims {
    int columns = 32;
    int rows = 32;
};

struct Extent {
    double width = 0.0;
    double height = 0.0;
};

using Triangle = std::array<std::uint32_t, 3>;

/// Gridded triangle mesh. Vertex (i, j) of the columns x rows anchor grid is
/// stored at index j * columns + i.
struct Mesh3D {
    std::vector<Vec3> vertices;
    std::vector<Vec2> uvs;
    std::vector<Triangle> triangles;
    GridDims grid;
    Extent extent;

    std::size_t index(int column, int row) const noexcept
    {
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(grid.columns) + static_cast<std::size_t>(column);
    }

    /// Vertex indices of the TL, TR, BR, BL grid corners.
    std::array<std::size_t, 4> corner_indices() const noexcept
    {
        return {index(0, 0), index(grid.columns - 1, 0), index(grid.columns - 1, grid.rows - 1),
                index(0, grid.rows - 1)};
    }

    Vec3 centroid() const noexcept
    {
        Vec3 sum;
        for (const Vec3& v : vertices) {
            sum = sum + v;
        }
        return vertices.empty() ? sum : sum * (1.0 / static_cast<double>(vertices.size()));
    }

    double surface_area() const noexcept
    {
        double area = 0.0;
        for (const Triangle& t : triangles) {
            const Vec3 a = vertices[t[0]];
            const Vec3 e1 = vertices[t[1]] - a;
            const Vec3 e2 = vertices[t[2]] - a;
            const Vec3 c{e1.y * e2.z - e1.z * e2.y, e1.z * e2.x - e1.x * e2.z, e1.x * e2.y - e1.y * e2.x};
            area += 0.5 * norm(c);
        }
        return area;
    }
};

/// Uniform planar anchor grid over [0,l] x [0,h] at z = 0. Each cell is
/// split along its top-left to bottom-right diagonal.
inline Mesh3D build_planar_mesh(Extent extent, GridDims grid)
{
    if (grid.columns < 2 || grid.rows < 2) {
        fail(ErrorKind::InvalidGrid, "grid needs at least 2x2 anchors");
    }
    if (!(extent.width > 0.0) || !(extent.height > 0.0) || !std::isfinite(extent.width) ||
        !std::isfinite(extent.height)) {
        fail(ErrorKind::InvalidExtent, "mesh extent must be positive");
    }

    Mesh3D mesh;
    mesh.grid = grid;
    mesh.extent = extent;
    const auto count = static_cast<std::size_t>(grid.columns) * static_cast<std::size_t>(grid.rows);
    mesh.vertices.reserve(count);
    mesh.uvs.reserve(count);
    for (int j = 0; j < grid.rows; ++j) {
        const double v = static_cast<double>(j) / (grid.rows - 1);
        for (int i = 0; i < grid.columns; ++i) {
            const double u = static_cast<double>(i) / (grid.columns - 1);
            mesh.vertices.push_back({u * extent.width, v * extent.height, 0.0});
            mesh.uvs.push_back({u, v});
        }
    }

    mesh.triangles.reserve(2 * static_cast<std::size_t>(grid.columns - 1) * static_cast<std::size_t>(grid.rows - 1));
    for (int j = 0; j + 1 < grid.rows; ++j) {
        for (int i = 0; i + 1 < grid.columns; ++i) {
            const auto tl = static_cast<std::uint32_t>(mesh.index(i, j));
            const auto tr = static_cast<std::uint32_t>(mesh.index(i + 1, j));
            const auto br = static_cast<std::uint32_t>(mesh.index(i + 1, j + 1));
            const auto bl = static_cast<std::uint32_t>(mesh.index(i, j + 1));
            mesh.triangles.push_back({tl, tr, br});
            mesh.triangles.push_back({tl, br, bl});
        }
    }
    return mesh;
}

} // namespace spoofsynth
