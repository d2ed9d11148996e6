#pragma once

// Shared test fixtures: bundled test cards on disk and seam-band geometry.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "spoofsynth/pipeline.hpp"
#include "spoofsynth/testcard.hpp"

namespace fixture {

using namespace spoofsynth;

inline double segment_distance(Vec2 p, Vec2 a, Vec2 b)
{
    const Vec2 ab = b - a;
    const double len2 = ab.x * ab.x + ab.y * ab.y;
    const double t = std::clamp(((p.x - a.x) * ab.x + (p.y - a.y) * ab.y) / len2, 0.0, 1.0);
    return norm(p - (a + ab * t));
}

/// Distance from the centre of pixel (x, y) to the quad outline.
inline double seam_distance(const std::array<Vec2, 4>& quad, int x, int y)
{
    const Vec2 p{x + 0.5, y + 0.5};
    double d = 1e300;
    for (std::size_t i = 0; i < 4; ++i) {
        d = std::min(d, segment_distance(p, quad[i], quad[(i + 1) % 4]));
    }
    return d;
}

/// Largest channel difference over pixels farther than `band` from the seam.
inline int diff_outside_seam(const Image& a, const Image& b, const std::array<Vec2, 4>& quad, double band)
{
    int worst = 0;
    for (int y = 0; y < a.height(); ++y) {
        for (int x = 0; x < a.width(); ++x) {
            if (seam_distance(quad, x, y) <= band) {
                continue;
            }
            for (std::size_t k = 0; k < 3; ++k) {
                worst = std::max(worst, std::abs(int(a.at(x, y)[k]) - int(b.at(x, y)[k])));
            }
        }
    }
    return worst;
}

inline RegionAnnotation annotation_for(const TestCard& card, SampleLabel label)
{
    RegionAnnotation a;
    a.id = card.name;
    a.image = card.name + ".png";
    a.corners = card.corners;
    a.eye_px_dist = card.eye_px_dist;
    a.label = label;
    return a;
}

/// Writes the test cards into `dir` and a manifest cycling through them with
/// the requested label counts. Returns the manifest path.
inline std::filesystem::path write_dataset(const std::filesystem::path& dir, int prints, int replays, int lives)
{
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const auto cards = make_test_cards();
    for (const TestCard& c : cards) {
        write_png(dir / (c.name + ".png"), c.image);
    }
    const fs::path manifest = dir / "annotations.jsonl";
    std::ofstream out(manifest);
    int n = 0;
    auto emit = [&](SampleLabel label, int count) {
        for (int i = 0; i < count; ++i, ++n) {
            const TestCard& c = cards[static_cast<std::size_t>(n) % cards.size()];
            Json j;
            j["id"] = c.name + "-" + std::to_string(n);
            j["image"] = c.name + ".png";
            j["label"] = to_string(label);
            if (label != SampleLabel::Live) {
                Json corners = Json::array();
                for (const Vec2& p : c.corners) {
                    corners.push_back({p.x, p.y});
                }
                j["corners"] = corners;
                j["eye_px_dist"] = c.eye_px_dist;
            }
            out << j.dump() << '\n';
        }
    };
    emit(SampleLabel::Print, prints);
    emit(SampleLabel::Replay, replays);
    emit(SampleLabel::Live, lives);
    return manifest;
}

inline std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / ("spoofsynth_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace fixture
