#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "hs2s/completion.hpp"
#include "hs2s/model.hpp"
#include "hs2s/motiondata.hpp"

namespace hs2s::eval {

// Short-term error table: one row per action + the Average row.
struct ErrorTable {
    std::vector<std::string> actions;
    std::vector<int> horizons_ms;
    std::vector<nd::Vec> cells;  // per action, per horizon
    nd::Vec average;             // arithmetic mean over action rows

    void recompute_average();
};

// Repeats the last observed frame.
nd::Matrix zero_velocity_predict(const nd::Matrix& X, int horizon_frames);

enum class MetricKind {
    kAngle,      // expmap -> rotmat -> Euler, global channels excluded
    kEuclidean,  // plain per-frame L2 on denormalized channels
};

// Per-horizon error between normalized prediction/ground-truth suffixes.
// Both are denormalized through stats first; trailing label channels are
// stripped. For kAngle the global translation/rotation channels are zeroed
// and each joint triple goes through the Euler conversion.
nd::Vec mean_angle_error(const nd::Matrix& pred, const nd::Matrix& gt,
                         const motion::NormStats& stats, const std::vector<int>& horizons_ms,
                         double fps, MetricKind kind = MetricKind::kAngle,
                         int label_channels = 0);

struct ClipSelection {
    struct Clip {
        int seq_index = 0;  // into the test set
        long start = 0;
    };
    std::map<std::string, std::vector<Clip>> per_action;
    std::uint64_t seed = 0;
    int clips_per_action = 8;
};

// Seeded selection over the test set; actions visited in sorted order.
ClipSelection select_clips(const std::vector<motion::MotionSequence>& test,
                           const motion::LabelVocab& vocab, int window_frames,
                           std::uint64_t seed, int clips_per_action = 8);

// Explicit clip list: lines `action,seq_index,start` (# comments allowed).
ClipSelection load_clip_list(const std::filesystem::path& path);

// Maps a normalized input window to >= horizon predicted frames.
using Predictor = std::function<nd::Matrix(const nd::Matrix& input, int horizon_frames)>;

// One scored clip, for the JSON-lines log.
struct ClipRecord {
    std::string action;
    int seq_index = 0;
    long start = 0;
    nd::Vec errors;
};

ErrorTable evaluate_short_term(const Predictor& predictor,
                               const std::vector<motion::MotionSequence>& test,
                               const motion::LabelVocab& vocab,
                               const motion::NormStats& stats, const ClipSelection& selection,
                               int input_frames, int output_frames,
                               MetricKind kind = MetricKind::kAngle, int label_channels = 0,
                               const std::vector<int>& horizons_ms = {80, 160, 320, 400},
                               std::vector<ClipRecord>* records = nullptr);

struct AblationEntry {
    std::string config;
    bool skipped = false;
    std::string diagnostics;
    nd::Vec errors;           // per horizon
    double mean_sigma = 0.0;  // ADD rows only
    double std_sigma = 0.0;
    bool has_sigma = false;
    std::vector<ClipRecord> clips;  // raw per-clip errors
};

struct AblationReport {
    std::vector<int> horizons_ms;
    std::vector<AblationEntry> entries;

    const AblationEntry* find(const std::string& config) const;
};

// Trains and scores all eight configurations on identical windows and seeds:
// the end-to-end baselines, the last-frame-padding autoencoder and the
// placeholder autoencoder, each with ADD/FN and completion/matching.
AblationReport run_ablation(const std::vector<motion::MotionSequence>& train,
                            const std::vector<motion::MotionSequence>& test,
                            const motion::NormStats& stats, const model::ArchConfig& cfg,
                            const model::TrainConfig& tc, int input_j, int pair_samples,
                            MetricKind kind);

void write_error_table_csv(const std::filesystem::path& path, const ErrorTable& table);
ErrorTable read_error_table_csv(const std::filesystem::path& path);
void write_ablation_csv(const std::filesystem::path& path, const AblationReport& report);

// JSON-lines log of per-clip errors.
void append_clip_log(const std::filesystem::path& path, const std::vector<ClipRecord>& records,
                     const std::vector<int>& horizons_ms, const std::string& tag = "");

}  // namespace hs2s::eval
