#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "spoofsynth/camera.hpp"
#include "spoofsynth/error.hpp"
#include "spoofsynth/image.hpp"
#include "spoofsynth/mesher.hpp"

namespace spoofsynth {

struct PixelOffset {
    int x = 0;
    int y = 0;
    friend constexpr bool operator==(PixelOffset, PixelOffset) noexcept = default;
};

/// Target window: layer pixel (i, j) is source-image pixel (origin.x + i, origin.y + j).
struct Viewport {
    int width = 0;
    int height = 0;
    PixelOffset origin{};
};

/// Rendered photo layer in a window of the source image.
struct RenderLayer {
    Image color;
    Grid<std::uint8_t> coverage;
    Grid<double> zbuffer;
    PixelOffset origin;

    int width() const noexcept { return color.width(); }
    int height() const noexcept { return color.height(); }

    static RenderLayer empty(const Viewport& vp)
    {
        return {Image(vp.width, vp.height), Grid<std::uint8_t>(vp.width, vp.height, 0),
                Grid<double>(vp.width, vp.height, std::numeric_limits<double>::infinity()), vp.origin};
    }

    friend bool operator==(const RenderLayer&, const RenderLayer&) = default;
};

struct RasterOptions {
    bool perspective_correct = false;
};

namespace detail {

/// Vertex positions are snapped to 1/256 px so edge tests are exact integer
/// arithmetic; shared edges then evaluate to exact negatives of each other.
inline constexpr int kSubpixelBits = 8;
inline constexpr std::int64_t kSubpixel = std::int64_t{1} << kSubpixelBits;
inline constexpr double kMaxCoordinate = double(1 << 20);

struct FixedPoint {
    std::int64_t x;
    std::int64_t y;
};

inline FixedPoint snap(Vec2 p, PixelOffset origin)
{
    const double x = p.x - origin.x;
    const double y = p.y - origin.y;
    if (!(std::abs(x) < kMaxCoordinate) || !(std::abs(y) < kMaxCoordinate)) {
        fail(ErrorKind::InvalidInput, "projected vertex too far from the viewport");
    }
    return {std::llround(x * kSubpixel), std::llround(y * kSubpixel)};
}

inline std::int64_t edge(FixedPoint a, FixedPoint b, FixedPoint p) noexcept
{
    return (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
}

/// With y down and positive triangle orientation, top edges run in +x and
/// left edges run upward.
inline bool is_top_left(FixedPoint a, FixedPoint b) noexcept
{
    const std::int64_t dx = b.x - a.x;
    const std::int64_t dy = b.y - a.y;
    return (dy == 0 && dx > 0) || dy < 0;
}

inline bool covers(std::int64_t w, bool top_left) noexcept { return w > 0 || (w == 0 && top_left); }

struct Fragment {
    std::size_t triangle;
    int x;
    int y;
    std::array<double, 3> weights; // barycentric, in triangle-vertex order
};

inline void check_projected(const ProjectedMesh& pm)
{
    const std::size_t n = pm.points.size();
    if (pm.depths.size() != n || pm.uvs.size() != n) {
        fail(ErrorKind::InvalidInput, "projected mesh arrays have inconsistent lengths");
    }
    for (double d : pm.depths) {
        if (!(d > 0.0)) {
            fail(ErrorKind::BehindCamera, "projected mesh has a non-positive depth");
        }
    }
    for (const Triangle& t : pm.triangles) {
        if (t[0] >= n || t[1] >= n || t[2] >= n) {
            fail(ErrorKind::InvalidInput, "triangle index out of range");
        }
    }
}

/// Visits every (triangle, pixel) pair whose pixel centre is inside the
/// triangle under the top-left rule, triangles in index order, pixels in
/// row-major order.
template <typename Visit>
void scan_triangles(const ProjectedMesh& pm, const Viewport& vp, Visit&& visit)
{
    if (vp.width < 1 || vp.height < 1) {
        fail(ErrorKind::EmptyViewport, "viewport must be at least 1x1");
    }
    check_projected(pm);

    std::vector<FixedPoint> fixed;
    fixed.reserve(pm.points.size());
    for (const Vec2& p : pm.points) {
        fixed.push_back(snap(p, vp.origin));
    }

    constexpr std::int64_t half = kSubpixel / 2;
    for (std::size_t t = 0; t < pm.triangles.size(); ++t) {
        std::array<std::size_t, 3> idx{pm.triangles[t][0], pm.triangles[t][1], pm.triangles[t][2]};
        std::array<FixedPoint, 3> v{fixed[idx[0]], fixed[idx[1]], fixed[idx[2]]};
        std::array<int, 3> slot{0, 1, 2};
        std::int64_t area = edge(v[0], v[1], v[2]);
        if (area == 0) {
            continue;
        }
        if (area < 0) {
            std::swap(v[1], v[2]);
            std::swap(slot[1], slot[2]);
            area = -area;
        }

        const std::int64_t min_x = std::min({v[0].x, v[1].x, v[2].x});
        const std::int64_t max_x = std::max({v[0].x, v[1].x, v[2].x});
        const std::int64_t min_y = std::min({v[0].y, v[1].y, v[2].y});
        const std::int64_t max_y = std::max({v[0].y, v[1].y, v[2].y});
        // Pixel i has its centre at i * kSubpixel + half.
        auto floor_div = [](std::int64_t a) {
            return static_cast<int>(a >= 0 ? a / kSubpixel : -((-a + kSubpixel - 1) / kSubpixel));
        };
        const int x0 = std::max(0, floor_div(min_x - half + kSubpixel - 1));
        const int x1 = std::min(vp.width - 1, floor_div(max_x - half));
        const int y0 = std::max(0, floor_div(min_y - half + kSubpixel - 1));
        const int y1 = std::min(vp.height - 1, floor_div(max_y - half));
        if (x0 > x1 || y0 > y1) {
            continue;
        }

        const bool tl0 = is_top_left(v[1], v[2]);
        const bool tl1 = is_top_left(v[2], v[0]);
        const bool tl2 = is_top_left(v[0], v[1]);
        const double inv_area = 1.0 / static_cast<double>(area);

        for (int y = y0; y <= y1; ++y) {
            const std::int64_t py = std::int64_t{y} * kSubpixel + half;
            for (int x = x0; x <= x1; ++x) {
                const FixedPoint p{std::int64_t{x} * kSubpixel + half, py};
                const std::int64_t w0 = edge(v[1], v[2], p);
                const std::int64_t w1 = edge(v[2], v[0], p);
                const std::int64_t w2 = edge(v[0], v[1], p);
                if (!covers(w0, tl0) || !covers(w1, tl1) || !covers(w2, tl2)) {
                    continue;
                }
                std::array<double, 3> sorted{};
                sorted[static_cast<std::size_t>(slot[0])] = static_cast<double>(w0) * inv_area;
                sorted[static_cast<std::size_t>(slot[1])] = static_cast<double>(w1) * inv_area;
                sorted[static_cast<std::size_t>(slot[2])] = static_cast<double>(w2) * inv_area;
                visit(Fragment{t, x, y, sorted});
            }
        }
    }
}

} // namespace detail

/// Z-buffered rendering of a textured projected mesh: strictly nearer
/// fragments win, ties keep the earlier triangle.
inline RenderLayer rasterize(const ProjectedMesh& pm, const Texture& tex, const Viewport& vp, RasterOptions options = {})
{
    if (vp.width < 1 || vp.height < 1) {
        fail(ErrorKind::EmptyViewport, "viewport must be at least 1x1");
    }
    RenderLayer layer = RenderLayer::empty(vp);
    detail::scan_triangles(pm, vp, [&](const detail::Fragment& f) {
        const Triangle& tri = pm.triangles[f.triangle];
        const auto& w = f.weights;
        const double depth = w[0] * pm.depths[tri[0]] + w[1] * pm.depths[tri[1]] + w[2] * pm.depths[tri[2]];
        if (!(depth < layer.zbuffer(f.x, f.y))) {
            return;
        }
        Vec2 uv;
        if (options.perspective_correct) {
            const double q0 = w[0] / pm.depths[tri[0]];
            const double q1 = w[1] / pm.depths[tri[1]];
            const double q2 = w[2] / pm.depths[tri[2]];
            const double inv = 1.0 / (q0 + q1 + q2);
            uv = (pm.uvs[tri[0]] * q0 + pm.uvs[tri[1]] * q1 + pm.uvs[tri[2]] * q2) * inv;
        } else {
            uv = pm.uvs[tri[0]] * w[0] + pm.uvs[tri[1]] * w[1] + pm.uvs[tri[2]] * w[2];
        }
        layer.zbuffer(f.x, f.y) = depth;
        layer.coverage(f.x, f.y) = 1;
        layer.color.set(f.x, f.y, to_rgb(tex.sample_uv(uv)));
    });
    return layer;
}

/// Number of triangles claiming each pixel, ignoring depth. On a fold-free
/// mesh every pixel is claimed at most once.
inline Grid<int> count_fragments(const ProjectedMesh& pm, const Viewport& vp)
{
    Grid<int> counts(vp.width, vp.height, 0);
    detail::scan_triangles(pm, vp, [&](const detail::Fragment& f) { ++counts(f.x, f.y); });
    return counts;
}

/// Smallest window containing every projected point, clipped to `bounds`
/// when given (width/height <= 0 means unbounded).
inline Viewport bounding_viewport(const ProjectedMesh& pm, const Viewport& bounds = {})
{
    double min_x = std::numeric_limits<double>::infinity();
    double min_y = min_x;
    double max_x = -min_x;
    double max_y = -min_x;
    for (const Vec2& p : pm.points) {
        min_x = std::min(min_x, p.x);
        min_y = std::min(min_y, p.y);
        max_x = std::max(max_x, p.x);
        max_y = std::max(max_y, p.y);
    }
    if (pm.points.empty()) {
        fail(ErrorKind::EmptyViewport, "no points to bound");
    }
    int x0 = static_cast<int>(std::floor(min_x));
    int y0 = static_cast<int>(std::floor(min_y));
    int x1 = static_cast<int>(std::ceil(max_x));
    int y1 = static_cast<int>(std::ceil(max_y));
    if (bounds.width > 0 && bounds.height > 0) {
        x0 = std::max(x0, bounds.origin.x);
        y0 = std::max(y0, bounds.origin.y);
        x1 = std::min(x1, bounds.origin.x + bounds.width);
        y1 = std::min(y1, bounds.origin.y + bounds.height);
    }
    if (x1 <= x0 || y1 <= y0) {
        fail(ErrorKind::EmptyViewport, "projected mesh does not intersect the allowed window");
    }
    return {x1 - x0, y1 - y0, {x0, y0}};
}

} // namespace spoofsynth
