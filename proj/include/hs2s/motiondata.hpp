#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hs2s/ndmath.hpp"
#include "hs2s/rng.hpp"

namespace hs2s::motion {

// One recorded motion clip. frames is (time x channels); for Human3.6M
// exponential-map data channels 0-2 are the global translation and 3-5 the
// global rotation, the rest are per-joint expmap triples.
struct MotionSequence {
    nd::Matrix frames;
    double fps = 50.0;
    int action = -1;   // index into a LabelVocab, -1 when unknown
    int subject = -1;  // Human3.6M subject id, -1 when unknown
};

enum class NormScheme { kUnitRange, kZscore };
enum class Direction { kForward, kInverse };

// Per-channel statistics of the training set plus the retained-channel mask.
// The normalize/denormalize pair is the reversible preprocessing contract.
struct NormStats {
    nd::Vec mean, stddev, min, max;
    std::vector<std::uint8_t> keep_mask;
    NormScheme scheme = NormScheme::kZscore;
    double ignore_threshold = 1e-4;

    int channel_count() const { return static_cast<int>(mean.size()); }
    int kept_count() const;
};

// Training/evaluation window of length T; X = rows [0, prefix_len),
// Y = rows [prefix_len, T).
struct SampleWindow {
    nd::Matrix full;
    int j = 0;
    int prefix_len = 0;

    nd::Matrix prefix() const;
    nd::Matrix suffix() const;
};

struct LabelVocab {
    std::vector<std::string> names;

    static constexpr int kMasked = -1;

    int size() const { return static_cast<int>(names.size()); }
    int index_of(const std::string& name) const;  // -1 when absent
};

// Plain-text exponential-map file: one frame per line, comma-separated
// decimals. Subject/action are recovered from the `S<k>/<action>_<idx>.txt`
// layout when present; the action index is resolved later against a vocab.
struct LoadedSequence {
    MotionSequence seq;
    std::string action_name;  // empty when the path does not follow the layout
};
LoadedSequence load_expmap_file(const std::filesystem::path& path);

MotionSequence downsample(const MotionSequence& seq, int factor);

NormStats compute_norm_stats(const std::vector<MotionSequence>& train, NormScheme scheme,
                             double ignore_threshold);

// Forward drops masked channels and scales; inverse restores dropped channels
// from the stored means. Population statistics, identity round-trip on kept
// channels to 1e-10.
nd::Matrix normalize(const nd::Matrix& frames, const NormStats& stats, Direction dir);
MotionSequence normalize(const MotionSequence& seq, const NormStats& stats, Direction dir);

// Appends vocab.size() one-hot channels (all zero for kMasked).
nd::Matrix append_label(const nd::Matrix& frames, int label_id, const LabelVocab& vocab);

// Uniform random start; draws exactly one rng value.
SampleWindow window_sample(const MotionSequence& seq, int T, int j, int tau, Rng& rng);

// Rodrigues formula; theta < 1e-12 falls back to the identity.
nd::Matrix expmap_to_rotmat(const std::array<double, 3>& r);
// Intrinsic z-y-x (yaw, pitch, roll); gimbal lock resolved by roll = 0.
std::array<double, 3> rotmat_to_euler(const nd::Matrix& R);

enum class SynthFamily { kSineWalk, kSineSit };

// Deterministic per-channel sinusoid generator standing in for mocap data in
// desk-scale runs. sine_walk draws strictly higher frequencies than sine_sit
// so the families stay separable; 25 fps, values bounded by +-1.3.
MotionSequence synth_motion(SynthFamily family, int channels, int length,
                            std::uint64_t seed);

const char* synth_family_name(SynthFamily family);

}  // namespace hs2s::motion
