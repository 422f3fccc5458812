#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "hs2s/model.hpp"
#include "hs2s/motiondata.hpp"

namespace hs2s::io {

// Plain-text `key = value` configuration with `#` comments. Unknown keys are
// rejected. Every field has a default; the training hyperparameters default
// to lr0=8e-4, decay=4e-3, batch=64, 1e4 samples/epoch, 300 epochs, 5 folds.
struct RunConfig {
    // architecture
    int T = 40;
    int tau = 10;
    int latent_dim = 1024;    // n
    int sub_hidden = 64;
    int dec_hidden = 64;
    std::string activation = "auto";  // auto | tanh | linear
    std::string variant = "hs2sae";   // hs2sae | basic_pad | h_seq2seq
    std::string seq_target = "suffix";  // h_seq2seq: suffix | full
    int fixed_j = 0;                    // h_seq2seq input prefix index (0 = T/tau - 1)

    // training
    double lr0 = 8e-4;
    double decay = 4e-3;
    int batch = 64;
    int epochs = 300;
    long samples_per_epoch = 10000;
    int folds = 5;
    std::uint64_t seed = 0;
    int val_samples = 64;

    // data
    std::string dataset = "human36m";  // human36m | sine_walk | sine_sit | sine_mix
    std::string data_dir;              // defaults to $HS2S_DATA_DIR
    std::string cache_path;            // prepared dataset container
    std::string norm_scheme = "zscore";  // zscore | unit_range
    double ignore_threshold = 1e-4;
    int downsample = 2;
    bool use_labels = false;
    int test_subject = 5;
    int synth_sequences = 40;
    int synth_length = 400;
    int synth_channels = 8;

    // io
    std::string out_dir = "out";

    void apply(const std::string& key, const std::string& value);
    std::string to_text() const;

    model::ArchConfig arch_config(int feature_dim) const;
    model::TrainConfig train_config() const;
    motion::NormScheme scheme() const;
};

RunConfig parse_run_config(const std::filesystem::path& path);
RunConfig parse_run_config_text(const std::string& text);

}  // namespace hs2s::io
