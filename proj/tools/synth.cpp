// Command-line front end: batch synthesis, single samples, mesh previews,
// PAD metrics, balanced schedules and external live-set merging.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "spoofsynth/spoofsynth.hpp"

namespace ss = spoofsynth;
namespace fs = std::filesystem;

namespace {

std::array<ss::Vec2, 4> parse_corners(const std::string& text)
{
    std::array<ss::Vec2, 4> corners;
    std::string spaced = text;
    std::replace(spaced.begin(), spaced.end(), ';', ' ');
    std::stringstream in(spaced);
    std::string pair;
    std::size_t n = 0;
    while (in >> pair) {
        if (n == 4) {
            break;
        }
        const auto comma = pair.find(',');
        if (comma == std::string::npos) {
            ss::fail(ss::ErrorKind::InvalidInput, "corner '" + pair + "' is not x,y");
        }
        corners[n++] = {std::stod(pair.substr(0, comma)), std::stod(pair.substr(comma + 1))};
    }
    if (n != 4) {
        ss::fail(ss::ErrorKind::InvalidInput, "--corners needs four x,y pairs separated by ';' or spaces");
    }
    return corners;
}

ss::BendAxis parse_axis(const std::string& s)
{
    if (s == "vertical") return ss::BendAxis::Vertical;
    if (s == "horizontal") return ss::BendAxis::Horizontal;
    ss::fail(ss::ErrorKind::InvalidInput, "--axis must be vertical or horizontal");
}

ss::SynthConfig config_or_default(const std::string& path)
{
    return path.empty() ? ss::SynthConfig{} : ss::load_config(path);
}

void print_metric(const char* name, double fraction)
{
    std::printf("%-12s %.2f%%\n", name, ss::eval::round_half_up(100.0 * fraction, 2));
}

void write_curve(const fs::path& path, const std::vector<ss::eval::CurvePoint>& curve)
{
    std::ofstream out(path);
    if (!out) {
        ss::fail(ss::ErrorKind::Io, "cannot write '" + path.string() + "'");
    }
    out << "threshold,far,frr\n";
    char buf[96];
    for (const auto& p : curve) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", p.threshold, p.far, p.frr);
        out << buf;
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Synthesize bent and rotated print-attack samples and evaluate PAD scores"};
    app.require_subcommand(1);

    // batch
    auto* batch = app.add_subcommand("batch", "Synthesize every spoof record of an annotation manifest");
    std::string manifest, config_path, out_dir = "synth_out";
    std::uint64_t seed = 0;
    unsigned jobs = 1;
    bool dump_layers = false;
    batch->add_option("--manifest", manifest, "Annotation manifest (JSONL)")->required();
    batch->add_option("--config", config_path, "Key-value config file");
    batch->add_option("--seed", seed, "Batch seed");
    batch->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    batch->add_option("--out", out_dir, "Output directory");
    batch->add_flag("--dump-layers", dump_layers, "Also write each rendered layer as PNG");

    // one
    auto* one = app.add_subcommand("one", "Synthesize a single sample");
    std::string image_path, corners_text, axis = "vertical", one_out = "synth.png";
    double yaw = 0.0, pitch = 0.0, eye_px = 63.0;
    std::optional<double> bend_deg;
    std::uint64_t one_seed = 0;
    one->add_option("--image", image_path, "Source PNG")->required();
    one->add_option("--corners", corners_text, "TL TR BR BL as \"x,y;x,y;x,y;x,y\" (or space-separated)")->required();
    one->add_option("--yaw", yaw, "Yaw in degrees (about the vertical axis)");
    one->add_option("--pitch", pitch, "Pitch in degrees (positive tilts the top away)");
    one->add_option("--bend", bend_deg, "Bending angle in degrees; omit for rotate-only");
    one->add_option("--axis", axis, "Bend axis: vertical or horizontal");
    one->add_option("--eye-px-dist", eye_px, "Inter-eye distance in source pixels");
    one->add_option("--config", config_path, "Key-value config file");
    one->add_option("--out", one_out, "Output PNG");
    one->add_option("--seed", one_seed, "Seed recorded in the manifest line");
    one->add_flag("--dump-layers", dump_layers, "Also write the rendered layer next to the output");

    // preview-mesh
    auto* preview = app.add_subcommand("preview-mesh", "Write the deformed mesh as Wavefront OBJ");
    double mesh_w = 200.0, mesh_h = 150.0;
    int grid = 32;
    std::string obj_out;
    preview->add_option("--width", mesh_w, "Sheet width");
    preview->add_option("--height", mesh_h, "Sheet height");
    preview->add_option("--grid", grid, "Anchors per side");
    preview->add_option("--yaw", yaw, "Yaw in degrees");
    preview->add_option("--pitch", pitch, "Pitch in degrees");
    preview->add_option("--bend", bend_deg, "Bending angle in degrees");
    preview->add_option("--axis", axis, "Bend axis: vertical or horizontal");
    preview->add_option("--out", obj_out, "OBJ path (default: stdout)");

    // metrics
    auto* metrics = app.add_subcommand("metrics", "EER, HTER and ISO PAD metrics from a score CSV");
    std::string scores_path, dev_split = "dev", test_split = "test", curve_out;
    metrics->add_option("--scores", scores_path, "CSV: sample_id,score,truth,attack_type,split")->required();
    metrics->add_option("--dev-split", dev_split, "Split that fixes the threshold");
    metrics->add_option("--test-split", test_split, "Split that is evaluated");
    metrics->add_option("--curve", curve_out, "Write the test FAR/FRR curve as CSV");

    // schedule
    auto* schedule = app.add_subcommand("schedule", "Balanced mini-batch schedule as JSONL");
    int batch_size = 64, epochs = 1;
    std::string ratio_text = "1:3", schedule_out;
    schedule->add_option("--manifest", manifest, "Sample manifest (JSONL)")->required();
    schedule->add_option("--batch", batch_size, "Mini-batch size");
    schedule->add_option("--ratio", ratio_text, "live:spoof ratio");
    schedule->add_option("--epochs", epochs, "Epochs");
    schedule->add_option("--seed", seed, "Shuffle seed");
    schedule->add_option("--out", schedule_out, "Output path (default: stdout)");

    // merge-live
    auto* merge = app.add_subcommand("merge-live", "Append an external live-only manifest");
    std::string base_path, external_path, merge_out;
    merge->add_option("--base", base_path, "Base manifest")->required();
    merge->add_option("--external", external_path, "External live manifest")->required();
    merge->add_option("--out", merge_out, "Merged manifest")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*batch) {
            ss::BatchOptions opts{manifest, out_dir, config_or_default(config_path), seed, jobs};
            opts.config.dump_layers = opts.config.dump_layers || dump_layers;
            const ss::BatchSummary summary = ss::run_batch(opts);
            for (const std::string& f : summary.failures) {
                std::cerr << "skipped: " << f << '\n';
            }
            std::cout << "records " << summary.records << ", pass-through " << summary.pass_through
                      << ", synthetic " << summary.synthetic << ", failures " << summary.failures.size()
                      << "\nmanifest " << summary.manifest_path.string() << '\n';
            return summary.ok() ? 0 : 2;
        }
        if (*one) {
            const ss::SynthConfig cfg = config_or_default(config_path);
            ss::RegionAnnotation ann{"one", image_path, parse_corners(corners_text), eye_px, ss::SampleLabel::Print};
            ss::SynthesisParams params;
            params.yaw_deg = yaw;
            params.pitch_deg = pitch;
            params.bend_deg = bend_deg;
            params.bend_axis = parse_axis(axis);
            params.mode = bend_deg ? ss::SynthesisMode::RotateAndBend : ss::SynthesisMode::RotateOnly;
            const ss::Image image = ss::read_png(image_path);
            const auto out = ss::synthesize_one(image, ann, params, cfg, one_seed, one_out);
            ss::write_png(one_out, out.image);
            if (dump_layers || cfg.dump_layers) {
                ss::write_png(fs::path(one_out).replace_extension(".layer.png"), out.layer.color);
            }
            std::cout << ss::to_json(out.record).dump() << '\n';
            return 0;
        }
        if (*preview) {
            ss::Mesh3D mesh = ss::build_planar_mesh({mesh_w, mesh_h}, {grid, grid});
            if (bend_deg) {
                mesh = ss::bend(mesh, {parse_axis(axis), ss::radians(*bend_deg)});
            }
            mesh = ss::rotate(mesh, {ss::radians(yaw), ss::radians(pitch), 0.0});
            if (obj_out.empty()) {
                ss::write_obj(std::cout, mesh);
            } else {
                std::ofstream out(obj_out);
                ss::write_obj(out, mesh);
            }
            return 0;
        }
        if (*metrics) {
            namespace ev = ss::eval;
            const auto all = ev::read_scores(scores_path);
            auto dev = ev::select_split(all, dev_split);
            auto test = ev::select_split(all, test_split);
            if (test.empty()) {
                test = all;
            }
            const bool has_dev = !dev.empty();
            const ev::EerResult dev_eer = ev::eer(has_dev ? dev : test);
            const ev::EerResult test_eer = ev::eer(test);
            const ev::PadMetrics pad = ev::pad_metrics(test, dev_eer.threshold);
            std::printf("threshold    %.17g (%s EER)\n", dev_eer.threshold, has_dev ? dev_split.c_str() : "test");
            print_metric("EER", test_eer.value);
            if (has_dev) {
                print_metric("HTER", ev::hter(dev, test));
            }
            for (const auto& [type, rate] : pad.apcer_per_type) {
                const std::string name = "APCER[" + std::string(ev::to_string(type)) + "]";
                std::printf("%-24s %.2f%%\n", name.c_str(), ev::round_half_up(100.0 * rate, 2));
            }
            print_metric("APCER", pad.apcer);
            print_metric("BPCER", pad.bpcer);
            print_metric("ACER", pad.acer);
            print_metric("Top-1", pad.top1);
            if (!curve_out.empty()) {
                write_curve(curve_out, ev::far_frr_curve(test));
            }
            return 0;
        }
        if (*schedule) {
            const auto records = ss::read_manifest(manifest);
            const auto [live, spoof] = ss::eval::pools_from_manifest(records);
            const auto plan =
                ss::eval::make_schedule(live, spoof, batch_size, ss::eval::parse_ratio(ratio_text), epochs, seed);
            if (schedule_out.empty()) {
                ss::eval::write_schedule(std::cout, plan);
            } else {
                std::ofstream out(schedule_out);
                ss::eval::write_schedule(out, plan);
            }
            return 0;
        }
        if (*merge) {
            const auto merged = ss::eval::merge_external_live(ss::read_manifest(base_path),
                                                              ss::read_manifest(external_path));
            ss::write_manifest(merge_out, merged);
            std::cout << merged.size() << " records\n";
            return 0;
        }
    } catch (const ss::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
