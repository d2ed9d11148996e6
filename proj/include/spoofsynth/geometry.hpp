#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <span>

namespace spoofsynth {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend constexpr Vec2 operator+(Vec2 a, Vec2 b) noexcept { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Vec2 operator-(Vec2 a, Vec2 b) noexcept { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Vec2 operator*(Vec2 a, double s) noexcept { return {a.x * s, a.y * s}; }
    friend constexpr Vec2 operator*(double s, Vec2 a) noexcept { return {a.x * s, a.y * s}; }
    friend constexpr bool operator==(Vec2, Vec2) noexcept = default;
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend constexpr Vec3 operator+(Vec3 a, Vec3 b) noexcept { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend constexpr Vec3 operator-(Vec3 a, Vec3 b) noexcept { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend constexpr Vec3 operator*(Vec3 a, double s) noexcept { return {a.x * s, a.y * s, a.z * s}; }
    friend constexpr Vec3 operator*(double s, Vec3 a) noexcept { return {a.x * s, a.y * s, a.z * s}; }
    friend constexpr bool operator==(Vec3, Vec3) noexcept = default;
};

inline double dot(Vec3 a, Vec3 b) noexcept { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(Vec3 a) noexcept { return std::sqrt(dot(a, a)); }
inline double norm(Vec2 a) noexcept { return std::hypot(a.x, a.y); }

/// z-component of (b - a) x (c - a).
inline double cross(Vec2 a, Vec2 b, Vec2 c) noexcept
{
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

/// Row-major 3x3 matrix.
struct Mat3 {
    std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

    static constexpr Mat3 identity() noexcept { return {}; }

    double& operator()(int r, int c) noexcept { return m[static_cast<std::size_t>(r * 3 + c)]; }
    double operator()(int r, int c) const noexcept { return m[static_cast<std::size_t>(r * 3 + c)]; }

    friend Mat3 operator*(const Mat3& a, const Mat3& b) noexcept
    {
        Mat3 out;
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) {
                out(r, c) = a(r, 0) * b(0, c) + a(r, 1) * b(1, c) + a(r, 2) * b(2, c);
            }
        }
        return out;
    }

    friend Vec3 operator*(const Mat3& a, Vec3 v) noexcept
    {
        return {a(0, 0) * v.x + a(0, 1) * v.y + a(0, 2) * v.z,
                a(1, 0) * v.x + a(1, 1) * v.y + a(1, 2) * v.z,
                a(2, 0) * v.x + a(2, 1) * v.y + a(2, 2) * v.z};
    }

    Mat3 transposed() const noexcept
    {
        Mat3 out;
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) {
                out(r, c) = (*this)(c, r);
            }
        }
        return out;
    }

    double determinant() const noexcept
    {
        const auto& a = *this;
        return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
               a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
               a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
    }

    Mat3 adjugate() const noexcept
    {
        const auto& a = *this;
        Mat3 out;
        out(0, 0) = a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
        out(0, 1) = a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2);
        out(0, 2) = a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1);
        out(1, 0) = a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2);
        out(1, 1) = a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0);
        out(1, 2) = a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2);
        out(2, 0) = a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0);
        out(2, 1) = a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1);
        out(2, 2) = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
        return out;
    }
};

/// Planar projective map, stored normalized so that h(2,2) == 1 when possible.
class Homography {
public:
    Homography() = default;
    explicit Homography(const Mat3& h) : h_(normalized(h)) {}

    const Mat3& matrix() const noexcept { return h_; }

    Vec2 apply(Vec2 p) const noexcept
    {
        const Vec3 q = h_ * Vec3{p.x, p.y, 1.0};
        return {q.x / q.z, q.y / q.z};
    }

    /// Homogeneous weight of p; the map is only valid where this is positive.
    double weight(Vec2 p) const noexcept { return h_(2, 0) * p.x + h_(2, 1) * p.y + h_(2, 2); }

    Homography inverse() const noexcept { return Homography(h_.adjugate()); }

    bool is_identity(double tol = 0.0) const noexcept
    {
        const Mat3 id = Mat3::identity();
        for (std::size_t i = 0; i < 9; ++i) {
            if (std::abs(h_.m[i] - id.m[i]) > tol) {
                return false;
            }
        }
        return true;
    }

private:
    static Mat3 normalized(Mat3 h) noexcept
    {
        const double s = h(2, 2);
        if (s != 0.0 && std::isfinite(s)) {
            for (auto& v : h.m) {
                v /= s;
            }
        }
        return h;
    }

    Mat3 h_;
};

/// Projective map from the unit square (0,0),(1,0),(1,1),(0,1) onto the
/// quadrilateral p[0..3]. Closed form; returns nullopt if the quad is
/// degenerate (three collinear corners make the system singular).
inline std::optional<Mat3> square_to_quad(std::span<const Vec2, 4> p) noexcept
{
    const double sx = p[0].x - p[1].x + p[2].x - p[3].x;
    const double sy = p[0].y - p[1].y + p[2].y - p[3].y;
    const double dx1 = p[1].x - p[2].x;
    const double dx2 = p[3].x - p[2].x;
    const double dy1 = p[1].y - p[2].y;
    const double dy2 = p[3].y - p[2].y;
    const double den = dx1 * dy2 - dx2 * dy1;
    if (den == 0.0 || !std::isfinite(den)) {
        return std::nullopt;
    }
    const double g = (sx * dy2 - dx2 * sy) / den;
    const double h = (dx1 * sy - sx * dy1) / den;

    Mat3 m;
    m(0, 0) = p[1].x - p[0].x + g * p[1].x;
    m(0, 1) = p[3].x - p[0].x + h * p[3].x;
    m(0, 2) = p[0].x;
    m(1, 0) = p[1].y - p[0].y + g * p[1].y;
    m(1, 1) = p[3].y - p[0].y + h * p[3].y;
    m(1, 2) = p[0].y;
    m(2, 0) = g;
    m(2, 1) = h;
    m(2, 2) = 1.0;
    if (m.determinant() == 0.0) {
        return std::nullopt;
    }
    return m;
}

/// True if any three of the four points are (numerically) collinear or any
/// two coincide.
inline bool corners_degenerate(std::span<const Vec2, 4> p, double rel_tol = 1e-9) noexcept
{
    double scale = 0.0;
    for (int i = 0; i < 4; ++i) {
        for (int j = i + 1; j < 4; ++j) {
            scale = std::max(scale, norm(p[static_cast<std::size_t>(i)] - p[static_cast<std::size_t>(j)]));
        }
    }
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        return true;
    }
    const double tol = rel_tol * scale * scale;
    for (std::size_t skip = 0; skip < 4; ++skip) {
        std::array<Vec2, 3> t;
        std::size_t k = 0;
        for (std::size_t i = 0; i < 4; ++i) {
            if (i != skip) {
                t[k++] = p[i];
            }
        }
        if (std::abs(cross(t[0], t[1], t[2])) <= tol) {
            return true;
        }
    }
    return false;
}

/// Four-point homography mapping src[i] to dst[i], composed from two
/// unit-square maps. Returns nullopt for degenerate corner sets.
inline std::optional<Homography> fit_homography(std::span<const Vec2, 4> src, std::span<const Vec2, 4> dst) noexcept
{
    if (corners_degenerate(src) || corners_degenerate(dst)) {
        return std::nullopt;
    }
    const auto s = square_to_quad(src);
    const auto d = square_to_quad(dst);
    if (!s || !d) {
        return std::nullopt;
    }
    return Homography(*d * s->adjugate());
}

} // namespace spoofsynth
