#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "spoofsynth/error.hpp"
#include "spoofsynth/pipeline.hpp"

namespace spoofsynth::eval {

enum class Truth { Live, Spoof };
enum class AttackType { None, PlanePrint, BentPrint, Replay };

inline std::string_view to_string(Truth t) noexcept { return t == Truth::Live ? "live" : "spoof"; }

inline std::string_view to_string(AttackType a) noexcept
{
    switch (a) {
    case AttackType::None: return "none";
    case AttackType::PlanePrint: return "plane_print";
    case AttackType::BentPrint: return "bent_print";
    case AttackType::Replay: return "replay";
    }
    return "none";
}

struct ScoreRecord {
    std::string sample_id;
    double score = 0.0; // higher = more live
    Truth truth = Truth::Live;
    AttackType attack_type = AttackType::None;
    std::string split = "test";
};

using ScoreSet = std::span<const ScoreRecord>;

// ---------------------------------------------------------------------------
// Score files

inline constexpr std::string_view kScoreHeader = "sample_id,score,truth,attack_type,split";

inline std::vector<ScoreRecord> parse_scores(std::string_view text)
{
    std::istringstream in{std::string(text)};
    std::string line;
    std::vector<ScoreRecord> out;
    int line_no = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (!header) {
            if (line != kScoreHeader) {
                fail(ErrorKind::InvalidInput, "score file must start with '" + std::string(kScoreHeader) + "'");
            }
            header = true;
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',')) {
            cells.push_back(cell);
        }
        const std::string where = "score line " + std::to_string(line_no);
        if (cells.size() != 5) {
            fail(ErrorKind::InvalidInput, where + ": expected 5 columns");
        }
        ScoreRecord r;
        r.sample_id = cells[0];
        char* end = nullptr;
        r.score = std::strtod(cells[1].c_str(), &end);
        if (cells[1].empty() || *end != '\0' || !std::isfinite(r.score)) {
            fail(ErrorKind::InvalidInput, where + ": bad score '" + cells[1] + "'");
        }
        if (cells[2] == "live") {
            r.truth = Truth::Live;
        } else if (cells[2] == "spoof") {
            r.truth = Truth::Spoof;
        } else {
            fail(ErrorKind::InvalidInput, where + ": truth must be live or spoof");
        }
        if (cells[3] == "none") {
            r.attack_type = AttackType::None;
        } else if (cells[3] == "plane_print") {
            r.attack_type = AttackType::PlanePrint;
        } else if (cells[3] == "bent_print") {
            r.attack_type = AttackType::BentPrint;
        } else if (cells[3] == "replay") {
            r.attack_type = AttackType::Replay;
        } else {
            fail(ErrorKind::InvalidInput, where + ": unknown attack_type '" + cells[3] + "'");
        }
        if ((r.truth == Truth::Live) != (r.attack_type == AttackType::None)) {
            fail(ErrorKind::InvalidInput, where + ": attack_type must be none exactly for live samples");
        }
        r.split = cells[4];
        out.push_back(std::move(r));
    }
    return out;
}

inline std::vector<ScoreRecord> read_scores(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        fail(ErrorKind::Io, "cannot open score file '" + path.string() + "'");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_scores(buffer.str());
}

inline std::vector<ScoreRecord> select_split(ScoreSet scores, std::string_view split)
{
    std::vector<ScoreRecord> out;
    for (const ScoreRecord& r : scores) {
        if (r.split == split) {
            out.push_back(r);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Error-rate curves

/// A sample is accepted as live iff score >= threshold.
struct CurvePoint {
    double threshold;
    double far; // spoof accepted
    double frr; // live rejected
    std::size_t false_accepts;
    std::size_t false_rejects;
};

namespace detail {

struct SortedScores {
    std::vector<double> live;
    std::vector<double> spoof;
};

inline SortedScores split_by_truth(ScoreSet scores)
{
    SortedScores s;
    for (const ScoreRecord& r : scores) {
        (r.truth == Truth::Live ? s.live : s.spoof).push_back(r.score);
    }
    if (s.live.empty() || s.spoof.empty()) {
        fail(ErrorKind::OneClassOnly, "need at least one live and one spoof score");
    }
    std::sort(s.live.begin(), s.live.end());
    std::sort(s.spoof.begin(), s.spoof.end());
    return s;
}

inline CurvePoint evaluate(const SortedScores& s, double t)
{
    const auto fa = static_cast<std::size_t>(s.spoof.end() - std::lower_bound(s.spoof.begin(), s.spoof.end(), t));
    const auto fr = static_cast<std::size_t>(std::lower_bound(s.live.begin(), s.live.end(), t) - s.live.begin());
    return {t, static_cast<double>(fa) / static_cast<double>(s.spoof.size()),
            static_cast<double>(fr) / static_cast<double>(s.live.size()), fa, fr};
}

} // namespace detail

/// FAR/FRR at -inf, at every distinct score, and at +inf, ascending.
inline std::vector<CurvePoint> far_frr_curve(ScoreSet scores)
{
    const detail::SortedScores s = detail::split_by_truth(scores);
    std::vector<double> thresholds;
    thresholds.reserve(s.live.size() + s.spoof.size() + 2);
    thresholds.push_back(-std::numeric_limits<double>::infinity());
    std::merge(s.live.begin(), s.live.end(), s.spoof.begin(), s.spoof.end(), std::back_inserter(thresholds));
    thresholds.push_back(std::numeric_limits<double>::infinity());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

    std::vector<CurvePoint> curve;
    curve.reserve(thresholds.size());
    for (double t : thresholds) {
        curve.push_back(detail::evaluate(s, t));
    }
    return curve;
}

struct EerResult {
    double value;
    double threshold;
};

/// Threshold minimizing |FAR - FRR| (lowest on ties); the EER is the mean
/// of FAR and FRR there. Comparisons use exact integer counts.
inline EerResult eer(ScoreSet scores)
{
    const detail::SortedScores s = detail::split_by_truth(scores);
    const std::vector<CurvePoint> curve = far_frr_curve(scores);
    const auto n_live = static_cast<long double>(s.live.size());
    const auto n_spoof = static_cast<long double>(s.spoof.size());
    // |fa/ns - fr/nl| compared as |fa*nl - fr*ns|, exact for realistic sizes.
    auto gap = [&](const CurvePoint& p) {
        return std::abs(static_cast<long double>(p.false_accepts) * n_live -
                        static_cast<long double>(p.false_rejects) * n_spoof);
    };
    const CurvePoint* best = &curve.front();
    for (const CurvePoint& p : curve) {
        if (gap(p) < gap(*best)) {
            best = &p;
        }
    }
    return {(best->far + best->frr) / 2.0, best->threshold};
}

/// Threshold from the dev EER, error rates from the test set.
inline double hter(ScoreSet dev, ScoreSet test)
{
    const double t = eer(dev).threshold;
    const CurvePoint p = detail::evaluate(detail::split_by_truth(test), t);
    return (p.far + p.frr) / 2.0;
}

struct PadMetrics {
    std::map<AttackType, double> apcer_per_type;
    double apcer = 0.0;
    double bpcer = 0.0;
    double acer = 0.0;
    double top1 = 0.0;
};

/// APCER is the worst per-attack-type rate over the types present.
inline PadMetrics pad_metrics(ScoreSet scores, double threshold)
{
    std::map<AttackType, std::pair<std::size_t, std::size_t>> per_type; // (accepted, total)
    std::size_t live = 0, live_rejected = 0, correct = 0;
    for (const ScoreRecord& r : scores) {
        const bool accepted = r.score >= threshold;
        if (r.truth == Truth::Live) {
            ++live;
            live_rejected += accepted ? 0 : 1;
            correct += accepted ? 1 : 0;
        } else {
            if (r.attack_type == AttackType::None) {
                fail(ErrorKind::MissingAttackType, "spoof sample '" + r.sample_id + "' has no attack type");
            }
            auto& [acc, total] = per_type[r.attack_type];
            ++total;
            acc += accepted ? 1 : 0;
            correct += accepted ? 0 : 1;
        }
    }
    if (live == 0 || per_type.empty()) {
        fail(ErrorKind::OneClassOnly, "need at least one live and one spoof score");
    }
    PadMetrics m;
    for (const auto& [type, counts] : per_type) {
        const double rate = static_cast<double>(counts.first) / static_cast<double>(counts.second);
        m.apcer_per_type[type] = rate;
        m.apcer = std::max(m.apcer, rate);
    }
    m.bpcer = static_cast<double>(live_rejected) / static_cast<double>(live);
    m.acer = (m.apcer + m.bpcer) / 2.0;
    m.top1 = static_cast<double>(correct) / static_cast<double>(scores.size());
    return m;
}

/// Decimal half-up rounding of the value's 15-significant-digit form, so
/// 11.715 (stored as 11.7149999...) rounds to 11.72 as written.
inline double round_half_up(double value, int decimals)
{
    if (!std::isfinite(value)) {
        return value;
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.14e", std::abs(value));
    // buf: d.dddddddddddddde[+-]XX
    std::string digits;
    digits.push_back(buf[0]);
    digits.append(buf + 2, 14);
    const int exponent = std::atoi(buf + 17);
    const int keep = exponent + 1 + decimals; // digits kept before rounding
    if (keep < 0) {
        return 0.0;
    }
    long long kept = 0;
    for (int i = 0; i < keep && i < static_cast<int>(digits.size()); ++i) {
        kept = kept * 10 + (digits[static_cast<std::size_t>(i)] - '0');
    }
    for (int i = static_cast<int>(digits.size()); i < keep; ++i) {
        kept *= 10;
    }
    if (keep < static_cast<int>(digits.size()) && digits[static_cast<std::size_t>(keep)] >= '5') {
        ++kept;
    }
    const double out = static_cast<double>(kept) / std::pow(10.0, decimals);
    return value < 0 ? -out : out;
}

// ---------------------------------------------------------------------------
// Balanced sampling

struct Ratio {
    int live = 1;
    int spoof = 3;
};

struct ScheduleEntry {
    std::string id;
    Truth truth;
    friend bool operator==(const ScheduleEntry&, const ScheduleEntry&) = default;
};

struct Batch {
    int epoch = 0;
    std::vector<ScheduleEntry> entries; // live entries first, then spoof
    friend bool operator==(const Batch&, const Batch&) = default;
};

struct BatchSchedule {
    std::vector<Batch> batches;
    int live_per_batch = 0;
    int spoof_per_batch = 0;
    int batch_size = 0;
    friend bool operator==(const BatchSchedule&, const BatchSchedule&) = default;
};

namespace detail {

/// Draws without replacement; reshuffles when exhausted or when an epoch starts.
class PoolCycler {
public:
    PoolCycler(std::span<const std::string> ids, SampleStream& rng) : ids_(ids), order_(ids.size()), rng_(rng)
    {
        for (std::size_t i = 0; i < order_.size(); ++i) {
            order_[i] = i;
        }
    }

    void reshuffle()
    {
        for (std::size_t i = order_.size(); i > 1; --i) {
            std::swap(order_[i - 1], order_[rng_.below(i)]);
        }
        pos_ = 0;
    }

    const std::string& next()
    {
        if (pos_ == order_.size()) {
            reshuffle();
        }
        return ids_[order_[pos_++]];
    }

private:
    std::span<const std::string> ids_;
    std::vector<std::size_t> order_;
    std::size_t pos_ = 0;
    SampleStream& rng_;
};

} // namespace detail

/// Fixed live:spoof composition in every mini-batch. An epoch lasts until
/// the pool that needs more batches has been seen once; the other pool is
/// oversampled by reshuffled repetition.
inline BatchSchedule make_schedule(std::span<const std::string> live_ids, std::span<const std::string> spoof_ids,
                                   int batch_size, Ratio ratio, int epochs, std::uint64_t seed)
{
    if (live_ids.empty() || spoof_ids.empty()) {
        fail(ErrorKind::EmptyPool, "both live and spoof pools must be non-empty");
    }
    if (batch_size <= 0 || ratio.live <= 0 || ratio.spoof <= 0 || epochs < 0) {
        fail(ErrorKind::InvalidInput, "batch size and ratio terms must be positive");
    }
    const long long parts = static_cast<long long>(ratio.live) + ratio.spoof;
    if ((static_cast<long long>(batch_size) * ratio.live) % parts != 0) {
        fail(ErrorKind::IndivisibleRatio, "batch " + std::to_string(batch_size) + " cannot be split " +
                                              std::to_string(ratio.live) + ":" + std::to_string(ratio.spoof));
    }
    BatchSchedule schedule;
    schedule.batch_size = batch_size;
    schedule.live_per_batch = static_cast<int>(static_cast<long long>(batch_size) * ratio.live / parts);
    schedule.spoof_per_batch = batch_size - schedule.live_per_batch;
    if (schedule.live_per_batch == 0 || schedule.spoof_per_batch == 0) {
        fail(ErrorKind::IndivisibleRatio, "ratio leaves one class with no slots in a batch");
    }

    auto ceil_div = [](std::size_t a, std::size_t b) { return (a + b - 1) / b; };
    const std::size_t per_epoch =
        std::max(ceil_div(live_ids.size(), static_cast<std::size_t>(schedule.live_per_batch)),
                 ceil_div(spoof_ids.size(), static_cast<std::size_t>(schedule.spoof_per_batch)));

    SampleStream rng(seed);
    detail::PoolCycler live(live_ids, rng);
    detail::PoolCycler spoof(spoof_ids, rng);
    for (int e = 0; e < epochs; ++e) {
        live.reshuffle();
        spoof.reshuffle();
        for (std::size_t b = 0; b < per_epoch; ++b) {
            Batch batch;
            batch.epoch = e;
            batch.entries.reserve(static_cast<std::size_t>(batch_size));
            for (int k = 0; k < schedule.live_per_batch; ++k) {
                batch.entries.push_back({live.next(), Truth::Live});
            }
            for (int k = 0; k < schedule.spoof_per_batch; ++k) {
                batch.entries.push_back({spoof.next(), Truth::Spoof});
            }
            schedule.batches.push_back(std::move(batch));
        }
    }
    return schedule;
}

inline Ratio parse_ratio(std::string_view text)
{
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        fail(ErrorKind::InvalidInput, "ratio must look like live:spoof, e.g. 1:3");
    }
    Ratio r;
    try {
        r.live = std::stoi(std::string(text.substr(0, colon)));
        r.spoof = std::stoi(std::string(text.substr(colon + 1)));
    } catch (const std::exception&) {
        fail(ErrorKind::InvalidInput, "ratio must look like live:spoof, e.g. 1:3");
    }
    return r;
}

/// One JSON object per batch.
inline void write_schedule(std::ostream& out, const BatchSchedule& schedule)
{
    for (std::size_t i = 0; i < schedule.batches.size(); ++i) {
        const Batch& b = schedule.batches[i];
        Json j;
        j["epoch"] = b.epoch;
        j["batch"] = i;
        Json samples = Json::array();
        for (const ScheduleEntry& e : b.entries) {
            samples.push_back(Json{{"id", e.id}, {"truth", to_string(e.truth)}});
        }
        j["samples"] = std::move(samples);
        out << j.dump() << '\n';
    }
}

// ---------------------------------------------------------------------------
// External live data

/// Append live-only external records, tagged origin=external.
inline std::vector<ManifestRecord> merge_external_live(std::vector<ManifestRecord> base,
                                                       std::span<const ManifestRecord> external)
{
    for (const ManifestRecord& r : external) {
        if (r.label != SampleLabel::Live) {
            fail(ErrorKind::NonLiveExternal, "external record '" + r.source_path + "' is not live");
        }
    }
    base.reserve(base.size() + external.size());
    for (ManifestRecord r : external) {
        r.origin = "external";
        base.push_back(std::move(r));
    }
    return base;
}

/// Manifest records split into live and spoof sample ids (output paths).
inline std::pair<std::vector<std::string>, std::vector<std::string>> pools_from_manifest(
    std::span<const ManifestRecord> records)
{
    std::pair<std::vector<std::string>, std::vector<std::string>> pools;
    for (const ManifestRecord& r : records) {
        (r.label == SampleLabel::Live ? pools.first : pools.second).push_back(r.output_path);
    }
    return pools;
}

} // namespace spoofsynth::eval
