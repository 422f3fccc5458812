#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hs2s/motiondata.hpp"
#include "hs2s/ndmath.hpp"
#include "hs2s/rng.hpp"

namespace hs2s::model {

enum class Variant { kHs2sae, kBasicPad, kHSeq2Seq };

// For the end-to-end seq2seq baseline: train on the unseen suffix only
// (X -> Y) or on the whole window (X -> XY).
enum class SeqTarget { kSuffix, kFullWindow };

struct ArchConfig {
    int T = 40;
    int tau = 10;
    int n = 1024;        // latent dimension
    int d = 54;          // channels per frame (pose + appended labels)
    int sub_hidden = 64;
    int dec_hidden = 64;
    // Candidate/dense activation for everything except the higher-level
    // encoder, which is always tanh. Use linear with z-score data.
    nd::Activation act = nd::Activation::kTanh;
    Variant variant = Variant::kHs2sae;
    SeqTarget seq_target = SeqTarget::kSuffix;  // kHSeq2Seq only
    int fixed_j = 0;                            // kHSeq2Seq input prefix index

    int blocks() const { return T / tau; }
    void validate() const;
};

// All trainable weights. The sub-encoder is shared across the T/tau
// subsequence positions. latent_proj maps z to the decoder's initial hidden
// state and exists only when n != dec_hidden.
struct ModelParams {
    nd::GruParams sub;                        // d -> sub_hidden
    nd::GruParams top;                        // sub_hidden -> n, tanh candidate
    std::optional<nd::DenseParams> latent_proj;  // n -> dec_hidden, linear
    nd::GruParams dec;                        // 1 (zero input) -> dec_hidden
    nd::DenseParams pose1;                    // dec_hidden -> dec_hidden
    nd::DenseParams pose2;                    // dec_hidden -> d
    nd::GruParams res1, res2;                 // dec_hidden -> dec_hidden
    nd::DenseParams res_out;                  // dec_hidden -> d
};

struct LatentCode {
    nd::Vec z;
    int prefix_len = 0;  // j * tau
};

struct TrainConfig {
    double lr0 = 8e-4;
    double decay = 4e-3;
    int batch = 64;
    int epochs = 300;
    long samples_per_epoch = 10000;
    int folds = 5;
    std::uint64_t seed = 0;
    // classification variation: mask a third of labels and a third of poses
    bool class_masking = false;
    int label_channels = 0;
    // windows evaluated per validation pass
    int val_samples = 64;
};

ModelParams init_params(const ArchConfig& cfg, std::uint64_t seed);
ModelParams zero_params(const ArchConfig& cfg);
nd::ParamSet param_set(ModelParams& p);

// Repeats every row of a (T/tau x c) sequence tau consecutive times.
nd::Matrix repeat_unit(const nd::Matrix& seq, int tau, int T);

// Pads X to length T (zero placeholder frames; basic_pad repeats the last
// input frame), sub-encodes the T/tau subsequences, runs the higher encoder
// and returns the j-th state (basic_pad: the final state).
LatentCode encode_prefix(const ModelParams& p, const ArchConfig& cfg, const nd::Matrix& X);

// All prefix codes of a full window in one shared pass (hs2sae/h_seq2seq).
std::vector<LatentCode> encode_all_prefixes(const ModelParams& p, const ArchConfig& cfg,
                                            const nd::Matrix& full);

nd::Matrix decode(const ModelParams& p, const ArchConfig& cfg, const LatentCode& code);

// Target j: the first j*tau frames, then frame j*tau repeated to length T.
nd::Matrix build_target(const nd::Matrix& full, int tau, int j);
std::vector<nd::Matrix> build_targets(const nd::Matrix& full, int tau);

// Mean over j of MAE(decode(encode(prefix_j)), target_j).
double multi_loss(const ModelParams& p, const ArchConfig& cfg, const nd::Matrix& full);

// The variant's training loss: multi_loss for the autoencoders, the fixed_j
// suffix/full-window MAE for the end-to-end baseline. `input` feeds the
// encoder; targets are built from `target` (equal to input unless masking).
double train_loss(const ModelParams& p, const ArchConfig& cfg, const nd::Matrix& input,
                  const nd::Matrix& target);
// Same value; accumulates analytic parameter gradients into grads.
double train_loss_and_grad(const ModelParams& p, const ArchConfig& cfg,
                           const nd::Matrix& input, const nd::Matrix& target,
                           ModelParams& grads);

// Splits the batch into random thirds: labels zeroed / poses zeroed / untouched.
void mask_for_classification(std::vector<nd::Matrix>& batch, int label_channels, Rng& rng);

struct TrainHistory {
    std::vector<double> step_loss;  // per optimizer step (batch mean)
    std::vector<double> val_loss;   // per epoch
    long best_epoch = -1;
};

struct TrainResult {
    ModelParams params;
    TrainHistory history;
};

// Seeded end-to-end training with rotating 5-fold validation; returns the
// parameters with the best validation loss plus the full history.
TrainResult train_autoencoder(const std::vector<motion::MotionSequence>& data,
                              const ArchConfig& cfg, const TrainConfig& tc);

}  // namespace hs2s::model
