#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "spoofsynth/error.hpp"
#include "spoofsynth/geometry.hpp"

namespace spoofsynth {

using Rgb = std::array<std::uint8_t, 3>;
using RgbF = std::array<double, 3>;

/// Interleaved 8-bit RGB raster. Pixel (x, y) covers the continuous square
/// [x, x+1) x [y, y+1); its sample sits at the centre (x + 0.5, y + 0.5).
class Image {
public:
    Image() = default;
    Image(int width, int height, Rgb fill = {0, 0, 0}) : width_(width), height_(height)
    {
        if (width < 0 || height < 0) {
            fail(ErrorKind::InvalidInput, "negative image dimensions");
        }
        data_.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3);
        for (std::size_t i = 0; i < data_.size(); i += 3) {
            data_[i] = fill[0];
            data_[i + 1] = fill[1];
            data_[i + 2] = fill[2];
        }
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    bool empty() const noexcept { return width_ == 0 || height_ == 0; }
    bool contains(int x, int y) const noexcept { return x >= 0 && y >= 0 && x < width_ && y < height_; }

    Rgb at(int x, int y) const noexcept
    {
        const std::size_t i = index(x, y);
        return {data_[i], data_[i + 1], data_[i + 2]};
    }

    void set(int x, int y, Rgb c) noexcept
    {
        const std::size_t i = index(x, y);
        data_[i] = c[0];
        data_[i + 1] = c[1];
        data_[i + 2] = c[2];
    }

    /// Nearest in-bounds pixel.
    Rgb at_clamped(int x, int y) const noexcept
    {
        return at(std::clamp(x, 0, width_ - 1), std::clamp(y, 0, height_ - 1));
    }

    /// Bilinear sample at a continuous position; out-of-range taps clamp to
    /// the nearest edge pixel.
    RgbF sample(Vec2 p) const noexcept
    {
        const double fx = p.x - 0.5;
        const double fy = p.y - 0.5;
        const double x0f = std::floor(fx);
        const double y0f = std::floor(fy);
        const double tx = fx - x0f;
        const double ty = fy - y0f;
        const int x0 = static_cast<int>(std::clamp(x0f, -1.0, static_cast<double>(width_)));
        const int y0 = static_cast<int>(std::clamp(y0f, -1.0, static_cast<double>(height_)));
        const Rgb c00 = at_clamped(x0, y0);
        const Rgb c10 = at_clamped(x0 + 1, y0);
        const Rgb c01 = at_clamped(x0, y0 + 1);
        const Rgb c11 = at_clamped(x0 + 1, y0 + 1);
        RgbF out;
        for (std::size_t k = 0; k < 3; ++k) {
            const double top = c00[k] + (c10[k] - c00[k]) * tx;
            const double bottom = c01[k] + (c11[k] - c01[k]) * tx;
            out[k] = top + (bottom - top) * ty;
        }
        return out;
    }

    const std::vector<std::uint8_t>& bytes() const noexcept { return data_; }
    std::vector<std::uint8_t>& bytes() noexcept { return data_; }

    friend bool operator==(const Image&, const Image&) = default;

private:
    std::size_t index(int x, int y) const noexcept
    {
        return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)) * 3;
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> data_;
};

inline std::uint8_t to_u8(double v) noexcept
{
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

inline Rgb to_rgb(const RgbF& c) noexcept { return {to_u8(c[0]), to_u8(c[1]), to_u8(c[2])}; }

/// Largest absolute per-channel difference between two same-sized images.
inline int max_channel_diff(const Image& a, const Image& b)
{
    if (a.width() != b.width() || a.height() != b.height()) {
        fail(ErrorKind::InvalidInput, "image size mismatch");
    }
    int worst = 0;
    for (std::size_t i = 0; i < a.bytes().size(); ++i) {
        worst = std::max(worst, std::abs(int(a.bytes()[i]) - int(b.bytes()[i])));
    }
    return worst;
}

/// Same-size dense scalar grid.
template <typename T>
class Grid {
public:
    Grid() = default;
    Grid(int width, int height, T fill = T{})
        : width_(width), height_(height), data_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill)
    {
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    bool contains(int x, int y) const noexcept { return x >= 0 && y >= 0 && x < width_ && y < height_; }

    T& operator()(int x, int y) noexcept { return data_[index(x, y)]; }
    const T& operator()(int x, int y) const noexcept { return data_[index(x, y)]; }

    const std::vector<T>& values() const noexcept { return data_; }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    std::size_t index(int x, int y) const noexcept
    {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

} // namespace spoofsynth
