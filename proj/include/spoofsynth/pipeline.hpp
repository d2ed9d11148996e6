#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "spoofsynth/camera.hpp"
#include "spoofsynth/composite.hpp"
#include "spoofsynth/config.hpp"
#include "spoofsynth/deform.hpp"
#include "spoofsynth/error.hpp"
#include "spoofsynth/mesher.hpp"
#include "spoofsynth/png_io.hpp"
#include "spoofsynth/raster.hpp"

namespace spoofsynth {

using Json = nlohmann::ordered_json;

enum class SampleLabel { Live, Print, Replay, SyntheticSpoof };

inline std::string_view to_string(SampleLabel label) noexcept
{
    switch (label) {
    case SampleLabel::Live: return "live";
    case SampleLabel::Print: return "print";
    case SampleLabel::Replay: return "replay";
    case SampleLabel::SyntheticSpoof: return "synthetic_spoof";
    }
    return "live";
}

inline SampleLabel parse_label(std::string_view s)
{
    if (s == "live") return SampleLabel::Live;
    if (s == "print") return SampleLabel::Print;
    if (s == "replay") return SampleLabel::Replay;
    if (s == "synthetic_spoof") return SampleLabel::SyntheticSpoof;
    fail(ErrorKind::InvalidInput, "unknown label '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// Parameter sampling

enum class SynthesisMode { RotateOnly, RotateAndBend };

struct SynthesisParams {
    double yaw_deg = 0.0;
    double pitch_deg = 0.0;
    std::optional<double> bend_deg;
    BendAxis bend_axis = BendAxis::Vertical;
    SynthesisMode mode = SynthesisMode::RotateOnly;
};

inline constexpr double kYawMaxDeg = 40.0;
inline constexpr double kPitchMaxDeg = 10.0;
inline constexpr double kBendMinDeg = 30.0;
inline constexpr double kBendMaxDeg = 60.0;
inline constexpr int kPrintSlots = 10;
inline constexpr int kReplaySlots = 5;
inline constexpr int kBentPrintSlots = 5;

inline int slots_for(SampleLabel label) noexcept
{
    switch (label) {
    case SampleLabel::Print: return kPrintSlots;
    case SampleLabel::Replay: return kReplaySlots;
    default: return 0;
    }
}

inline std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Seed of the stream for one (record, slot) pair of a batch.
inline std::uint64_t derive_seed(std::uint64_t batch_seed, std::uint64_t record, std::uint64_t slot) noexcept
{
    return mix64(mix64(mix64(batch_seed) ^ record) ^ (slot + 1));
}

/// Portable uniform stream: mt19937_64 output is fixed by the standard, and
/// the [0,1) mapping is done here rather than by a library distribution.
class SampleStream {
public:
    explicit SampleStream(std::uint64_t seed) : engine_(seed) {}

    double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Unbiased integer in [0, n).
    std::uint64_t below(std::uint64_t n) noexcept
    {
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

private:
    std::mt19937_64 engine_;
};

struct ParamPolicy {
    AxisPolicy axis = AxisPolicy::Vertical;
    bool mirror_yaw = false;
};

/// Print slots 0-4 rotate and bend, 5-9 only rotate; replay slots 0-4 only
/// rotate. Draw order is yaw, pitch, bend, axis (then the yaw sign when
/// mirroring is on); all four are drawn in every slot.
inline SynthesisParams sample_params(SampleStream& rng, SampleLabel label, int slot, ParamPolicy policy = {})
{
    if (label != SampleLabel::Print && label != SampleLabel::Replay) {
        fail(ErrorKind::InvalidInput, "parameters are only sampled for print and replay sources");
    }
    if (slot < 0 || slot >= slots_for(label)) {
        fail(ErrorKind::SlotOutOfRange, "slot " + std::to_string(slot) + " out of range for " +
                                            std::string(to_string(label)));
    }
    SynthesisParams p;
    p.yaw_deg = rng.uniform(0.0, kYawMaxDeg);
    p.pitch_deg = rng.uniform(-kPitchMaxDeg, kPitchMaxDeg);
    const double bend = rng.uniform(kBendMinDeg, kBendMaxDeg);
    const double axis_draw = rng.uniform();
    if (policy.mirror_yaw && rng.uniform() < 0.5) {
        p.yaw_deg = -p.yaw_deg;
    }
    switch (policy.axis) {
    case AxisPolicy::Vertical: p.bend_axis = BendAxis::Vertical; break;
    case AxisPolicy::Horizontal: p.bend_axis = BendAxis::Horizontal; break;
    case AxisPolicy::Random: p.bend_axis = axis_draw < 0.5 ? BendAxis::Vertical : BendAxis::Horizontal; break;
    }
    if (label == SampleLabel::Print && slot < kBentPrintSlots) {
        p.mode = SynthesisMode::RotateAndBend;
        p.bend_deg = bend;
    }
    return p;
}

inline Json to_json(const SynthesisParams& p)
{
    Json j;
    j["yaw_deg"] = p.yaw_deg;
    j["pitch_deg"] = p.pitch_deg;
    j["bend_deg"] = p.bend_deg ? Json(*p.bend_deg) : Json(nullptr);
    j["bend_axis"] = p.bend_axis == BendAxis::Vertical ? "vertical" : "horizontal";
    j["mode"] = p.mode == SynthesisMode::RotateAndBend ? "rotate_and_bend" : "rotate_only";
    return j;
}

inline SynthesisParams params_from_json(const Json& j)
{
    SynthesisParams p;
    p.yaw_deg = j.at("yaw_deg").get<double>();
    p.pitch_deg = j.at("pitch_deg").get<double>();
    if (j.contains("bend_deg") && !j.at("bend_deg").is_null()) {
        p.bend_deg = j.at("bend_deg").get<double>();
    }
    p.bend_axis = j.value("bend_axis", std::string("vertical")) == "horizontal" ? BendAxis::Horizontal
                                                                                 : BendAxis::Vertical;
    p.mode = p.bend_deg ? SynthesisMode::RotateAndBend : SynthesisMode::RotateOnly;
    return p;
}

// ---------------------------------------------------------------------------
// Records

/// One line of the input annotation manifest.
struct RegionAnnotation {
    std::string id;
    std::string image;
    std::array<Vec2, 4> corners;
    double eye_px_dist = 0.0;
    SampleLabel label = SampleLabel::Live;
};

inline RegionAnnotation annotation_from_json(const Json& j, std::size_t index)
{
    try {
        RegionAnnotation a;
        a.image = j.at("image").get<std::string>();
        a.label = parse_label(j.at("label").get<std::string>());
        a.id = j.contains("id") ? j.at("id").get<std::string>() : "rec" + std::to_string(index);
        if (j.contains("corners")) {
            const Json& c = j.at("corners");
            if (!c.is_array() || c.size() != 4) {
                fail(ErrorKind::InvalidInput, "corners must hold four [x,y] pairs");
            }
            for (std::size_t i = 0; i < 4; ++i) {
                if (!c[i].is_array() || c[i].size() != 2) {
                    fail(ErrorKind::InvalidInput, "corners must hold four [x,y] pairs");
                }
                a.corners[i] = {c[i][0].get<double>(), c[i][1].get<double>()};
            }
        } else if (a.label != SampleLabel::Live) {
            fail(ErrorKind::InvalidInput, "spoof records need corners");
        }
        a.eye_px_dist = j.value("eye_px_dist", 0.0);
        return a;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::InvalidInput, "record " + std::to_string(index) + ": " + e.what());
    }
}

struct ManifestRecord {
    std::string source_path;
    std::string output_path;
    SampleLabel label = SampleLabel::Live;
    std::optional<SynthesisParams> params;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> parent_id;
    std::optional<std::string> origin; // set to "external" by live-set merging
};

inline Json to_json(const ManifestRecord& r)
{
    Json j;
    j["source_path"] = r.source_path;
    j["output_path"] = r.output_path;
    j["label"] = to_string(r.label);
    j["params"] = r.params ? to_json(*r.params) : Json(nullptr);
    j["seed"] = r.seed ? Json(*r.seed) : Json(nullptr);
    j["parent_id"] = r.parent_id ? Json(*r.parent_id) : Json(nullptr);
    if (r.origin) {
        j["origin"] = *r.origin;
    }
    return j;
}

/// Reads both output manifests and raw annotation manifests (which only
/// carry `image` and `label`).
inline ManifestRecord record_from_json(const Json& j)
{
    ManifestRecord r;
    r.source_path = j.contains("source_path") ? j.at("source_path").get<std::string>() : j.value("image", std::string());
    r.output_path = j.contains("output_path") ? j.at("output_path").get<std::string>() : r.source_path;
    r.label = parse_label(j.at("label").get<std::string>());
    if (j.contains("params") && !j.at("params").is_null()) {
        r.params = params_from_json(j.at("params"));
    }
    if (j.contains("seed") && !j.at("seed").is_null()) {
        r.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("parent_id") && !j.at("parent_id").is_null()) {
        r.parent_id = j.at("parent_id").get<std::string>();
    }
    if (j.contains("origin") && !j.at("origin").is_null()) {
        r.origin = j.at("origin").get<std::string>();
    }
    return r;
}

/// Parse JSONL; blank lines are skipped.
inline std::vector<Json> read_jsonl(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        fail(ErrorKind::Io, "cannot open '" + path.string() + "'");
    }
    std::vector<Json> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        try {
            rows.push_back(Json::parse(line));
        } catch (const nlohmann::json::exception& e) {
            fail(ErrorKind::InvalidInput, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return rows;
}

inline std::vector<ManifestRecord> read_manifest(const std::filesystem::path& path)
{
    std::vector<ManifestRecord> out;
    for (const Json& j : read_jsonl(path)) {
        out.push_back(record_from_json(j));
    }
    return out;
}

inline void write_manifest(const std::filesystem::path& path, const std::vector<ManifestRecord>& records)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        fail(ErrorKind::Io, "cannot write '" + path.string() + "'");
    }
    for (const ManifestRecord& r : records) {
        out << to_json(r).dump() << '\n';
    }
}

// ---------------------------------------------------------------------------
// One sample

struct SynthesisOutput {
    Image image;
    ManifestRecord record;
    RenderLayer layer; // final layer in source-image coordinates
};

inline double radians(double deg) noexcept { return deg * std::numbers::pi / 180.0; }

/// Render the deformed, projected photo back into a copy of `image`:
/// rectify, mesh, bend, rotate, place in the world, project, rasterize,
/// realign and feather.
inline SynthesisOutput synthesize_one(const Image& image, const RegionAnnotation& annotation,
                                      const SynthesisParams& params, const SynthConfig& cfg,
                                      std::uint64_t seed = 0, const std::string& output_path = {})
{
    try {
        if (annotation.label != SampleLabel::Print && annotation.label != SampleLabel::Replay) {
            fail(ErrorKind::InvalidInput, "only print and replay sources are synthesized");
        }
        const Quad quad(annotation.corners);
        TextureSize size = default_texture_size(quad);
        if (cfg.texture.width > 0) size.width = cfg.texture.width;
        if (cfg.texture.height > 0) size.height = cfg.texture.height;
        const Texture texture = rectify_region(image, quad, size);

        Mesh3D mesh = build_planar_mesh({double(size.width), double(size.height)}, cfg.grid);
        if (params.bend_deg) {
            const double theta = radians(*params.bend_deg);
            mesh = bend(mesh, {params.bend_axis, theta});
            if (cfg.bend_both_axes) {
                const BendAxis other = params.bend_axis == BendAxis::Vertical ? BendAxis::Horizontal : BendAxis::Vertical;
                mesh = bend(mesh, {other, theta}, {.allow_nonplanar = true});
            }
        }
        mesh = rotate(mesh, {radians(params.yaw_deg), radians(params.pitch_deg), 0.0});

        const double scale = pixel_scale(annotation.eye_px_dist, cfg.eye_distance_mm);
        const Mesh3D world = to_world(mesh, scale, cfg.depth_mm);
        const double focal = cfg.focal_px > 0.0 ? cfg.focal_px : scale * cfg.depth_mm;
        const ProjectedMesh projected =
            (cfg.projection == Projection::Weak ? project_weak(world, focal) : project_perspective(world, focal))
                .translated(quad.centroid());

        const Viewport frame{image.width(), image.height(), {0, 0}};
        const Viewport allowed{2 * image.width(), 2 * image.height(), {-image.width() / 2, -image.height() / 2}};
        const Viewport viewport = bounding_viewport(projected, allowed);
        RenderLayer layer = rasterize(projected, texture, viewport, {cfg.perspective_correct});
        if (cfg.composite.realign) {
            layer = realign_corners(layer, projected.grid_corners(), quad, frame).layer;
        }

        SynthesisOutput out;
        out.image = feather_blend(image, layer, cfg.composite);
        out.layer = std::move(layer);
        out.record.source_path = annotation.image;
        out.record.output_path = output_path;
        out.record.label = SampleLabel::SyntheticSpoof;
        out.record.params = params;
        out.record.seed = seed;
        out.record.parent_id = annotation.id;
        return out;
    } catch (const Error& e) {
        throw e.with_context("sample " + annotation.id);
    }
}

// ---------------------------------------------------------------------------
// Batches

struct BatchOptions {
    std::filesystem::path manifest;
    std::filesystem::path out_dir;
    SynthConfig config;
    std::uint64_t seed = 0;
    unsigned jobs = 1;
};

struct BatchSummary {
    std::size_t records = 0;
    std::size_t pass_through = 0;
    std::size_t synthetic = 0;
    std::vector<std::string> failures;
    std::filesystem::path manifest_path;

    bool ok() const noexcept { return failures.empty(); }
};

namespace detail {

inline std::string file_stem_for(std::size_t index, const std::string& id, int slot)
{
    std::string safe;
    for (char c : id) {
        const bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
        safe.push_back(keep ? c : '_');
    }
    char prefix[32];
    std::snprintf(prefix, sizeof(prefix), "%06zu_", index);
    return prefix + safe + "_s" + std::to_string(slot);
}

struct RecordResult {
    std::vector<ManifestRecord> records;
    std::vector<std::string> errors;
};

} // namespace detail

/// Every record passes through; print records add 10 synthetic samples and
/// replay records 5. Streams are keyed by (seed, record index, slot), so
/// output bytes do not depend on `jobs`. Per-sample failures are collected
/// and skipped; only an unreadable manifest throws.
inline BatchSummary run_batch(const BatchOptions& options)
{
    namespace fs = std::filesystem;
    const std::vector<Json> rows = read_jsonl(options.manifest);
    const fs::path base_dir = options.manifest.parent_path();
    fs::create_directories(options.out_dir / "images");

    std::vector<detail::RecordResult> results(rows.size());
    std::atomic<std::size_t> next{0};
    const ParamPolicy policy{options.config.bend_axis, options.config.mirror_yaw};

    auto work = [&] {
        for (std::size_t index = next++; index < rows.size(); index = next++) {
            detail::RecordResult& result = results[index];
            RegionAnnotation annotation;
            try {
                annotation = annotation_from_json(rows[index], index);
            } catch (const Error& e) {
                result.errors.push_back("record " + std::to_string(index) + ": " + e.what());
                continue;
            }
            ManifestRecord original;
            original.source_path = annotation.image;
            original.output_path = annotation.image;
            original.label = annotation.label;
            result.records.push_back(original);

            const int slots = slots_for(annotation.label);
            if (slots == 0) {
                continue;
            }
            Image image;
            try {
                const fs::path path = fs::path(annotation.image).is_absolute() ? fs::path(annotation.image)
                                                                                : base_dir / annotation.image;
                image = read_png(path);
            } catch (const Error& e) {
                result.errors.push_back(e.with_context("sample " + annotation.id).what());
                continue;
            }
            for (int slot = 0; slot < slots; ++slot) {
                const std::uint64_t seed = derive_seed(options.seed, index, static_cast<std::uint64_t>(slot));
                SampleStream rng(seed);
                try {
                    const SynthesisParams params = sample_params(rng, annotation.label, slot, policy);
                    const std::string stem = detail::file_stem_for(index, annotation.id, slot);
                    const std::string rel = "images/" + stem + ".png";
                    SynthesisOutput out = synthesize_one(image, annotation, params, options.config, seed, rel);
                    write_png(options.out_dir / rel, out.image);
                    if (options.config.dump_layers) {
                        write_png(options.out_dir / "images" / (stem + "_layer.png"), out.layer.color);
                    }
                    result.records.push_back(std::move(out.record));
                } catch (const Error& e) {
                    result.errors.push_back(std::string(e.what()) + " (slot " + std::to_string(slot) + ")");
                }
            }
        }
    };

    const unsigned jobs = std::max(1u, options.jobs);
    std::vector<std::thread> workers;
    for (unsigned i = 1; i < jobs; ++i) {
        workers.emplace_back(work);
    }
    work();
    for (auto& t : workers) {
        t.join();
    }

    BatchSummary summary;
    summary.records = rows.size();
    std::vector<ManifestRecord> merged;
    for (auto& r : results) {
        for (auto& rec : r.records) {
            (rec.params ? summary.synthetic : summary.pass_through)++;
            merged.push_back(std::move(rec));
        }
        for (auto& e : r.errors) {
            summary.failures.push_back(std::move(e));
        }
    }
    summary.manifest_path = options.out_dir / "manifest.jsonl";
    write_manifest(summary.manifest_path, merged);
    return summary;
}

// ---------------------------------------------------------------------------
// Mesh inspection

/// Wavefront OBJ with texture coordinates (v flipped to OBJ's bottom-left origin).
inline void write_obj(std::ostream& out, const Mesh3D& mesh)
{
    char buf[128];
    for (const Vec3& v : mesh.vertices) {
        std::snprintf(buf, sizeof(buf), "v %.9g %.9g %.9g\n", v.x, v.y, v.z);
        out << buf;
    }
    for (const Vec2& uv : mesh.uvs) {
        std::snprintf(buf, sizeof(buf), "vt %.9g %.9g\n", uv.x, 1.0 - uv.y);
        out << buf;
    }
    for (const Triangle& t : mesh.triangles) {
        out << "f";
        for (std::uint32_t i : t) {
            out << ' ' << (i + 1) << '/' << (i + 1);
        }
        out << '\n';
    }
}

} // namespace spoofsynth
