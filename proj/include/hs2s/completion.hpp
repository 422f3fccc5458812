#pragma once

#include <vector>

#include "hs2s/model.hpp"

namespace hs2s::completion {

// Which latent pairing a completer is trained on: completion maps E(X) to
// E(XY); matching maps E(X) to E(Y) with Y encoded as its own sequence.
enum class PairMode { kCompletion, kMatching, kLabelRecovery };

const char* pair_mode_name(PairMode mode);

// The whole ADD completer: v = mean of d_j over sample pairs plus the
// per-component spread used for noise injection.
struct CompletionVector {
    int j = 0;
    nd::Vec v;
    nd::Vec sigma;
    long sample_count = 0;
    PairMode mode = PairMode::kCompletion;
};

// Single dense layer completer, linear activation, square n x n.
struct FnCompleter {
    nd::DenseParams layer;
    int trained_j = 0;
    PairMode mode = PairMode::kCompletion;
};

struct CodePair {
    nd::Vec p;  // E(X)
    nd::Vec c;  // E(XY), E(Y) or E(labeled X) depending on mode
};

struct PatternPairSet {
    std::vector<CodePair> pairs;
    int j = 0;
    PairMode mode = PairMode::kCompletion;
};

// d_j for one window pair.
nd::Vec latent_diff(const model::ModelParams& p, const model::ArchConfig& cfg,
                    const motion::SampleWindow& pair, PairMode mode);

PatternPairSet build_pairs(const model::ModelParams& p, const model::ArchConfig& cfg,
                           const std::vector<motion::SampleWindow>& windows, int j,
                           PairMode mode);

// Label-recovery pairs: p = E(window with label channels zeroed),
// c = E(window as-is). Windows must be full length T.
PatternPairSet build_label_pairs(const model::ModelParams& p, const model::ArchConfig& cfg,
                                 const std::vector<motion::SampleWindow>& windows,
                                 int label_channels);

CompletionVector compute_vj(const model::ModelParams& p, const model::ArchConfig& cfg,
                            const std::vector<motion::SampleWindow>& windows, int j,
                            PairMode mode);
CompletionVector compute_vj(const PatternPairSet& pairs);

// z + v; the result carries prefix_len = T (a complete-pattern code).
model::LatentCode complete_add(const model::LatentCode& z, const CompletionVector& cv,
                               const model::ArchConfig& cfg);

struct FnSchedule {
    int epochs = 50;
    int halve_every = 5;  // step decay, rate 0.5
    int batch = 64;
    double lr0 = 5e-3;
    std::uint64_t seed = 0;
};

FnCompleter fit_fn(const PatternPairSet& pairs, const FnSchedule& schedule);
nd::Vec apply_fn(const FnCompleter& fn, const nd::Vec& p);

// Elementwise MAE between layer(p_i) and c_i over a pair set.
double fn_eval_mae(const FnCompleter& fn, const PatternPairSet& pairs);

struct Completer {
    const CompletionVector* add = nullptr;
    const FnCompleter* fn = nullptr;  // exactly one of the two is set
};

// D(G(E(X))): encode the prefix, complete, decode the full window.
nd::Matrix predict_full(const model::ModelParams& p, const model::ArchConfig& cfg,
                        const Completer& completer, const nd::Matrix& X);

// D(G(E(X)) + scale * sigma ⊙ eps), eps ~ N(0, I).
nd::Matrix generate_noisy(const model::ModelParams& p, const model::ArchConfig& cfg,
                          const FnCompleter& fn, const nd::Vec& sigma, const nd::Matrix& X,
                          double scale, Rng& rng);

// k+1 decoded sequences along the segment from zA to zB; exact endpoints.
std::vector<nd::Matrix> interpolate(const model::ModelParams& p,
                                    const model::ArchConfig& cfg,
                                    const model::LatentCode& zA,
                                    const model::LatentCode& zB, int k);

// Frame-averaged label channels, clamped at 0 and normalized to sum 1;
// uniform when everything is zero.
nd::Vec read_label_probs(const nd::Matrix& decoded, int label_channels);

}  // namespace hs2s::completion
