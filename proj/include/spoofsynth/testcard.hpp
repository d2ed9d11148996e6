#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "spoofsynth/image.hpp"
#include "spoofsynth/mesher.hpp"

namespace spoofsynth {

/// Synthetic scene with a labelled photo region, for smoke tests and demos.
/// Content is smooth everywhere (at most a few grey levels per pixel),
/// including across the region boundary.
struct TestCard {
    std::string name;
    Image image;
    std::array<Vec2, 4> corners;
    double eye_px_dist = 0.0;
};

namespace detail {

inline double bump(double x, double y, double cx, double cy, double sx, double sy) noexcept
{
    const double dx = (x - cx) / sx;
    const double dy = (y - cy) / sy;
    return std::exp(-0.5 * (dx * dx + dy * dy));
}

/// Background gradient plus a soft face-like pattern centred at (cx, cy).
inline Image paint_scene(int w, int h, double cx, double cy, double face)
{
    Image img(w, h);
    const double tau = 2.0 * std::numbers::pi;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double px = x + 0.5;
            const double py = y + 0.5;
            double r = 70.0 + 100.0 * px / w + 20.0 * std::sin(tau * py / 160.0);
            double g = 90.0 + 80.0 * py / h + 20.0 * std::cos(tau * px / 200.0);
            double b = 120.0 + 40.0 * std::sin(tau * (px + py) / 300.0);
            const double skin = bump(px, py, cx, cy, 0.55 * face, 0.7 * face);
            r += 70.0 * skin;
            g += 40.0 * skin;
            b += 10.0 * skin;
            const double eyes = bump(px, py, cx - 0.3 * face, cy - 0.15 * face, 0.12 * face, 0.08 * face) +
                                bump(px, py, cx + 0.3 * face, cy - 0.15 * face, 0.12 * face, 0.08 * face);
            r -= 60.0 * eyes;
            g -= 60.0 * eyes;
            b -= 40.0 * eyes;
            img.set(x, y, {to_u8(r), to_u8(g), to_u8(b)});
        }
    }
    return img;
}

} // namespace detail

/// Three deterministic cards: an axis-aligned region, an in-plane rotated
/// one and a perspective-skewed one.
inline std::vector<TestCard> make_test_cards()
{
    std::vector<TestCard> cards;
    {
        TestCard c{"card_axis", detail::paint_scene(240, 200, 120, 100, 60), {}, 40.0};
        c.corners = {Vec2{60, 40}, Vec2{180, 40}, Vec2{180, 160}, Vec2{60, 160}};
        cards.push_back(std::move(c));
    }
    {
        TestCard c{"card_rotated", detail::paint_scene(256, 256, 128, 128, 70), {}, 50.0};
        const double a = 15.0 * std::numbers::pi / 180.0;
        const double hw = 70.0, hh = 85.0;
        const std::array<Vec2, 4> local{Vec2{-hw, -hh}, Vec2{hw, -hh}, Vec2{hw, hh}, Vec2{-hw, hh}};
        for (std::size_t i = 0; i < 4; ++i) {
            c.corners[i] = {128.0 + std::cos(a) * local[i].x - std::sin(a) * local[i].y,
                            128.0 + std::sin(a) * local[i].x + std::cos(a) * local[i].y};
        }
        cards.push_back(std::move(c));
    }
    {
        TestCard c{"card_skewed", detail::paint_scene(300, 220, 150, 110, 65), {}, 45.0};
        c.corners = {Vec2{82.5, 32.0}, Vec2{214.0, 44.5}, Vec2{221.0, 186.0}, Vec2{70.0, 178.5}};
        cards.push_back(std::move(c));
    }
    return cards;
}

} // namespace spoofsynth
