#pragma once

#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "spoofsynth/composite.hpp"
#include "spoofsynth/deform.hpp"
#include "spoofsynth/error.hpp"
#include "spoofsynth/mesher.hpp"

namespace spoofsynth {

enum class Projection { Perspective, Weak };
enum class AxisPolicy { Vertical, Horizontal, Random };

/// Every tunable of the synthesis recipe. Defaults are the values used when
/// no config file is given.
struct SynthConfig {
    // camera.*
    double focal_px = 0.0; // 0: f = s * d_z, reprojecting the unmoved photo onto itself
    double depth_mm = 400.0;
    double eye_distance_mm = 63.0;
    // composite.*
    CompositeConfig composite;
    // pipeline.*
    GridDims grid{32, 32};
    TextureSize texture{0, 0}; // 0: derived from the quad
    AxisPolicy bend_axis = AxisPolicy::Vertical;
    bool bend_both_axes = false;
    bool mirror_yaw = false;
    Projection projection = Projection::Perspective;
    bool perspective_correct = false;
    bool dump_layers = false;
};

namespace detail {

inline std::string_view trim(std::string_view s) noexcept
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

inline double parse_double(std::string_view key, std::string_view value)
{
    try {
        std::size_t used = 0;
        const std::string text(value);
        const double v = std::stod(text, &used);
        if (used == text.size()) {
            return v;
        }
    } catch (const std::exception&) {
    }
    fail(ErrorKind::InvalidInput, "config key '" + std::string(key) + "' expects a number, got '" +
                                      std::string(value) + "'");
}

inline int parse_int(std::string_view key, std::string_view value)
{
    int v = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        fail(ErrorKind::InvalidInput, "config key '" + std::string(key) + "' expects an integer, got '" +
                                          std::string(value) + "'");
    }
    return v;
}

inline bool parse_bool(std::string_view key, std::string_view value)
{
    if (value == "true" || value == "on" || value == "1" || value == "yes") {
        return true;
    }
    if (value == "false" || value == "off" || value == "0" || value == "no") {
        return false;
    }
    fail(ErrorKind::InvalidInput, "config key '" + std::string(key) + "' expects on/off, got '" +
                                      std::string(value) + "'");
}

} // namespace detail

/// Apply one `key = value` setting.
inline void apply_setting(SynthConfig& cfg, std::string_view key, std::string_view value)
{
    using namespace detail;
    if (key == "camera.f_px") {
        cfg.focal_px = parse_double(key, value);
    } else if (key == "camera.d_z_mm") {
        cfg.depth_mm = parse_double(key, value);
    } else if (key == "camera.d_r_mm") {
        cfg.eye_distance_mm = parse_double(key, value);
    } else if (key == "composite.feather_sigma") {
        cfg.composite.feather_sigma = parse_double(key, value);
    } else if (key == "composite.band") {
        cfg.composite.feather_band = parse_double(key, value);
    } else if (key == "composite.realign") {
        cfg.composite.realign = parse_bool(key, value);
    } else if (key == "pipeline.grid") {
        cfg.grid.columns = cfg.grid.rows = parse_int(key, value);
    } else if (key == "pipeline.grid_columns") {
        cfg.grid.columns = parse_int(key, value);
    } else if (key == "pipeline.grid_rows") {
        cfg.grid.rows = parse_int(key, value);
    } else if (key == "pipeline.texture_width") {
        cfg.texture.width = parse_int(key, value);
    } else if (key == "pipeline.texture_height") {
        cfg.texture.height = parse_int(key, value);
    } else if (key == "pipeline.bend_axis") {
        if (value == "vertical") {
            cfg.bend_axis = AxisPolicy::Vertical;
        } else if (value == "horizontal") {
            cfg.bend_axis = AxisPolicy::Horizontal;
        } else if (value == "random") {
            cfg.bend_axis = AxisPolicy::Random;
        } else {
            fail(ErrorKind::InvalidInput, "pipeline.bend_axis must be vertical, horizontal or random");
        }
    } else if (key == "pipeline.bend_both_axes") {
        cfg.bend_both_axes = parse_bool(key, value);
    } else if (key == "pipeline.mirror_yaw") {
        cfg.mirror_yaw = parse_bool(key, value);
    } else if (key == "pipeline.projection") {
        if (value == "perspective") {
            cfg.projection = Projection::Perspective;
        } else if (value == "weak") {
            cfg.projection = Projection::Weak;
        } else {
            fail(ErrorKind::InvalidInput, "pipeline.projection must be perspective or weak");
        }
    } else if (key == "pipeline.perspective_correct") {
        cfg.perspective_correct = parse_bool(key, value);
    } else if (key == "pipeline.dump_layers") {
        cfg.dump_layers = parse_bool(key, value);
    } else {
        fail(ErrorKind::InvalidInput, "unknown config key '" + std::string(key) + "'");
    }
}

/// Key-value text: one `key = value` per line, `#` starts a comment.
inline SynthConfig parse_config(std::string_view text)
{
    SynthConfig cfg;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view(line);
        if (const auto hash = view.find('#'); hash != std::string_view::npos) {
            view = view.substr(0, hash);
        }
        view = detail::trim(view);
        if (view.empty()) {
            continue;
        }
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) {
            fail(ErrorKind::InvalidInput, "config line " + std::to_string(line_no) + ": expected key = value");
        }
        apply_setting(cfg, detail::trim(view.substr(0, eq)), detail::trim(view.substr(eq + 1)));
    }
    return cfg;
}

inline SynthConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        fail(ErrorKind::Io, "cannot open config '" + path.string() + "'");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

} // namespace spoofsynth
