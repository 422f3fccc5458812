#pragma once

#include "hs2s/checkpoint.hpp"
#include "hs2s/evalbench.hpp"
#include "hs2s/runconfig.hpp"

namespace hs2s::pipeline {

// Assembles the configured dataset: synthetic families are regenerated from
// the seed, Human3.6M is ingested from data_dir (or the prepared cache).
// Sequences come back normalized, with labels appended when configured.
io::DatasetCache build_dataset(const io::RunConfig& rc);
io::DatasetCache build_synthetic_dataset(const io::RunConfig& rc);
io::DatasetCache build_h36m_dataset(const io::RunConfig& rc);

std::vector<motion::SampleWindow> draw_windows(
    const std::vector<motion::MotionSequence>& seqs, int T, int j, int tau, int count,
    Rng& rng);

// Label-recovery / classification evaluation: encodes label-zeroed test
// windows, completes them with ADD and FN, decodes and reads the label
// probabilities back. Mean probability of the true class, per class.
struct ClassifyReport {
    std::vector<std::string> class_names;
    nd::Vec add_mean_prob;   // per class
    nd::Vec fn_mean_prob;
    double add_overall = 0.0;  // mean true-class probability over all samples
    double fn_overall = 0.0;
    double add_accuracy = 0.0;
    double fn_accuracy = 0.0;
    int samples = 0;
};

ClassifyReport classify_eval(const io::DatasetCache& ds, const model::ModelParams& params,
                             const model::ArchConfig& cfg, int train_pairs, int test_samples,
                             std::uint64_t seed);

}  // namespace hs2s::pipeline
