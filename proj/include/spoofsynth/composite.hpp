#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <vector>

#include "spoofsynth/error.hpp"
#include "spoofsynth/geometry.hpp"
#include "spoofsynth/image.hpp"
#include "spoofsynth/mesher.hpp"
#include "spoofsynth/raster.hpp"

namespace spoofsynth {

struct CompositeConfig {
    double feather_sigma = 2.0; // px
    double feather_band = 6.0;  // px, half-width around the coverage boundary
    bool realign = true;
};

struct RealignResult {
    RenderLayer layer;
    Homography warp; // rendered-layer image coordinates -> source image coordinates
};

/// Warp a rendered layer so the projected grid corners land on the annotated
/// quad. `bounds` (if non-empty) clips the output window, normally to the
/// source image.
inline RealignResult realign_corners(const RenderLayer& layer, const std::array<Vec2, 4>& projected_corners,
                                     const Quad& quad, const Viewport& bounds = {})
{
    const auto fitted = fit_homography(std::span<const Vec2, 4>(projected_corners),
                                       std::span<const Vec2, 4>(quad.corners()));
    if (!fitted) {
        fail(ErrorKind::DegenerateCorners, "projected corners are collinear or coincident");
    }

    bool already_aligned = true;
    for (std::size_t i = 0; i < 4; ++i) {
        if (norm(projected_corners[i] - quad[i]) > 1e-9) {
            already_aligned = false;
        }
    }
    if (already_aligned) {
        return {layer, Homography()};
    }

    const Homography& warp = *fitted;
    const Homography inverse = warp.inverse();

    // Output window: image of the layer rectangle, or of the quad when the
    // rectangle straddles the homography's line at infinity.
    std::array<Vec2, 4> rect{Vec2{double(layer.origin.x), double(layer.origin.y)},
                             Vec2{double(layer.origin.x + layer.width()), double(layer.origin.y)},
                             Vec2{double(layer.origin.x + layer.width()), double(layer.origin.y + layer.height())},
                             Vec2{double(layer.origin.x), double(layer.origin.y + layer.height())}};
    std::array<Vec2, 4> outline = quad.corners();
    if (std::all_of(rect.begin(), rect.end(), [&](Vec2 p) { return warp.weight(p) > 0.0; })) {
        for (std::size_t i = 0; i < 4; ++i) {
            outline[i] = warp.apply(rect[i]);
        }
    }
    double min_x = outline[0].x, max_x = outline[0].x, min_y = outline[0].y, max_y = outline[0].y;
    for (const Vec2& p : outline) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }
    int x0 = static_cast<int>(std::floor(min_x)) - 1;
    int y0 = static_cast<int>(std::floor(min_y)) - 1;
    int x1 = static_cast<int>(std::ceil(max_x)) + 1;
    int y1 = static_cast<int>(std::ceil(max_y)) + 1;
    if (bounds.width > 0 && bounds.height > 0) {
        x0 = std::max(x0, bounds.origin.x);
        y0 = std::max(y0, bounds.origin.y);
        x1 = std::min(x1, bounds.origin.x + bounds.width);
        y1 = std::min(y1, bounds.origin.y + bounds.height);
    }
    if (x1 <= x0 || y1 <= y0) {
        return {RenderLayer::empty({1, 1, {x0, y0}}), warp};
    }

    RenderLayer out = RenderLayer::empty({x1 - x0, y1 - y0, {x0, y0}});
    for (int y = 0; y < out.height(); ++y) {
        for (int x = 0; x < out.width(); ++x) {
            const Vec2 p{x0 + x + 0.5, y0 + y + 0.5};
            if (!(inverse.weight(p) > 0.0)) {
                continue;
            }
            const Vec2 s = inverse.apply(p) - Vec2{double(layer.origin.x), double(layer.origin.y)};
            const double fx = s.x - 0.5;
            const double fy = s.y - 0.5;
            if (!(std::abs(fx) < 1e7) || !(std::abs(fy) < 1e7)) {
                continue;
            }
            const int ix = static_cast<int>(std::floor(fx));
            const int iy = static_cast<int>(std::floor(fy));
            const double tx = fx - ix;
            const double ty = fy - iy;

            double cov = 0.0;
            double depth = 0.0;
            RgbF color{0.0, 0.0, 0.0};
            const std::array<std::array<int, 2>, 4> taps{{{ix, iy}, {ix + 1, iy}, {ix, iy + 1}, {ix + 1, iy + 1}}};
            const std::array<double, 4> weights{(1 - tx) * (1 - ty), tx * (1 - ty), (1 - tx) * ty, tx * ty};
            for (std::size_t k = 0; k < 4; ++k) {
                const int qx = taps[k][0];
                const int qy = taps[k][1];
                if (!layer.coverage.contains(qx, qy) || layer.coverage(qx, qy) == 0 || weights[k] == 0.0) {
                    continue;
                }
                const Rgb c = layer.color.at(qx, qy);
                cov += weights[k];
                depth += weights[k] * layer.zbuffer(qx, qy);
                for (std::size_t ch = 0; ch < 3; ++ch) {
                    color[ch] += weights[k] * c[ch];
                }
            }
            if (cov < 0.5) {
                continue;
            }
            out.coverage(x, y) = 1;
            out.zbuffer(x, y) = depth / cov;
            out.color.set(x, y, to_rgb({color[0] / cov, color[1] / cov, color[2] / cov}));
        }
    }
    return {std::move(out), warp};
}

/// Normalized sampled Gaussian truncated at ceil(3 sigma).
inline std::vector<double> gaussian_kernel(double sigma)
{
    if (!(sigma > 0.0)) {
        return {1.0};
    }
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double w = std::exp(-double(i) * i / (2.0 * sigma * sigma));
        k[static_cast<std::size_t>(i + radius)] = w;
        sum += w;
    }
    for (double& w : k) {
        w /= sum;
    }
    return k;
}

namespace detail {

/// Separable convolution with clamp-to-edge borders.
inline Grid<double> blur(const Grid<double>& in, const std::vector<double>& kernel)
{
    const int radius = static_cast<int>(kernel.size() / 2);
    const int w = in.width();
    const int h = in.height();
    Grid<double> tmp(w, h, 0.0);
    Grid<double> out(w, h, 0.0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                acc += kernel[static_cast<std::size_t>(k + radius)] * in(std::clamp(x + k, 0, w - 1), y);
            }
            tmp(x, y) = acc;
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                acc += kernel[static_cast<std::size_t>(k + radius)] * tmp(x, std::clamp(y + k, 0, h - 1));
            }
            out(x, y) = acc;
        }
    }
    return out;
}

/// Pixels within Chebyshev distance `radius` of a pixel with the other
/// coverage value.
inline Grid<std::uint8_t> seam_band(const Grid<std::uint8_t>& cov, int radius)
{
    const int w = cov.width();
    const int h = cov.height();
    Grid<std::uint8_t> row_min(w, h), row_max(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::uint8_t lo = 1, hi = 0;
            for (int k = std::max(0, x - radius); k <= std::min(w - 1, x + radius); ++k) {
                lo = std::min(lo, cov(k, y));
                hi = std::max(hi, cov(k, y));
            }
            row_min(x, y) = lo;
            row_max(x, y) = hi;
        }
    }
    Grid<std::uint8_t> band(w, h, 0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::uint8_t lo = 1, hi = 0;
            for (int k = std::max(0, y - radius); k <= std::min(h - 1, y + radius); ++k) {
                lo = std::min(lo, row_min(x, k));
                hi = std::max(hi, row_max(x, k));
            }
            band(x, y) = lo != hi;
        }
    }
    return band;
}

/// Colour of the nearest covered pixel (4-connected breadth-first order)
/// for every pixel of the window.
inline Image extend_colors(const Image& color, const Grid<std::uint8_t>& cov)
{
    const int w = cov.width();
    const int h = cov.height();
    Image out = color;
    Grid<std::uint8_t> seen(w, h, 0);
    std::deque<std::pair<int, int>> queue;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (cov(x, y)) {
                seen(x, y) = 1;
                queue.emplace_back(x, y);
            }
        }
    }
    constexpr std::array<std::array<int, 2>, 4> steps{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
    while (!queue.empty()) {
        const auto [x, y] = queue.front();
        queue.pop_front();
        for (const auto& s : steps) {
            const int nx = x + s[0];
            const int ny = y + s[1];
            if (seen.contains(nx, ny) && !seen(nx, ny)) {
                seen(nx, ny) = 1;
                out.set(nx, ny, out.at(x, y));
                queue.emplace_back(nx, ny);
            }
        }
    }
    return out;
}

} // namespace detail

/// Paste the layer over the source. Near the coverage boundary the alpha is
/// the Gaussian-blurred coverage mask, elsewhere it is the mask itself.
inline Image feather_blend(const Image& source, const RenderLayer& layer, const CompositeConfig& cfg)
{
    Image out = source;
    const bool feather = cfg.feather_sigma > 0.0 && cfg.feather_band > 0.0 && std::isfinite(cfg.feather_sigma) &&
                         std::isfinite(cfg.feather_band);
    const std::vector<double> kernel = gaussian_kernel(feather ? cfg.feather_sigma : 0.0);
    const int band_px = feather ? static_cast<int>(std::floor(cfg.feather_band)) : 0;
    const int margin = feather ? band_px + static_cast<int>(kernel.size() / 2) + 1 : 0;

    const int x0 = std::max(0, layer.origin.x - margin);
    const int y0 = std::max(0, layer.origin.y - margin);
    const int x1 = std::min(source.width(), layer.origin.x + layer.width() + margin);
    const int y1 = std::min(source.height(), layer.origin.y + layer.height() + margin);
    if (x1 <= x0 || y1 <= y0) {
        return out;
    }
    const int w = x1 - x0;
    const int h = y1 - y0;

    Grid<std::uint8_t> cov(w, h, 0);
    Image color(w, h);
    bool any = false;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int lx = x0 + x - layer.origin.x;
            const int ly = y0 + y - layer.origin.y;
            if (layer.coverage.contains(lx, ly) && layer.coverage(lx, ly)) {
                cov(x, y) = 1;
                color.set(x, y, layer.color.at(lx, ly));
                any = true;
            }
        }
    }
    if (!any) {
        return out;
    }

    if (!feather) {
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                if (cov(x, y)) {
                    out.set(x0 + x, y0 + y, color.at(x, y));
                }
            }
        }
        return out;
    }

    Grid<double> mask(w, h, 0.0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            mask(x, y) = cov(x, y);
        }
    }
    const Grid<double> soft = detail::blur(mask, kernel);
    const Grid<std::uint8_t> band = detail::seam_band(cov, band_px);
    const Image extended = detail::extend_colors(color, cov);

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double alpha = band(x, y) ? soft(x, y) : mask(x, y);
            if (alpha == 0.0) {
                continue;
            }
            const Rgb fg = extended.at(x, y);
            if (alpha == 1.0) {
                out.set(x0 + x, y0 + y, fg);
                continue;
            }
            const Rgb bg = source.at(x0 + x, y0 + y);
            Rgb mixed;
            for (std::size_t k = 0; k < 3; ++k) {
                mixed[k] = to_u8(bg[k] + alpha * (double(fg[k]) - double(bg[k])));
            }
            out.set(x0 + x, y0 + y, mixed);
        }
    }
    return out;
}

} // namespace spoofsynth
