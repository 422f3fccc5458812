#include <algorithm>
#include <cmath>
#include <limits>

#include "hs2s/model.hpp"

namespace hs2s::model {

using motion::MotionSequence;
using nd::Matrix;

namespace {

void scale_grads(std::vector<Matrix>& grads, double s) {
    for (auto& g : grads)
        for (auto& v : g.data) v *= s;
}

std::vector<Matrix> snapshot(const nd::ParamSet& set) {
    std::vector<Matrix> out;
    out.reserve(set.size());
    for (const auto& r : set) out.push_back(*r.value);
    return out;
}

void restore(const nd::ParamSet& set, const std::vector<Matrix>& snap) {
    for (std::size_t i = 0; i < set.size(); ++i) *set[i].value = snap[i];
}

}  // namespace

TrainResult train_autoencoder(const std::vector<MotionSequence>& data, const ArchConfig& cfg,
                              const TrainConfig& tc) {
    cfg.validate();
    std::vector<int> usable;
    for (int i = 0; i < static_cast<int>(data.size()); ++i)
        if (data[i].frames.rows >= cfg.T) usable.push_back(i);
    if (usable.empty())
        throw DataError("train: no sequence has at least T=" + std::to_string(cfg.T) +
                        " frames");
    if (tc.class_masking && tc.label_channels < 1)
        throw ArgumentError("train: class_masking requires label_channels");

    TrainResult result;
    result.params = init_params(cfg, tc.seed);
    if (tc.epochs == 0) return result;

    const Rng master(tc.seed);
    Rng sample_rng = master.fork(1);
    Rng mask_rng = master.fork(2);

    nd::ParamSet pset = param_set(result.params);
    nd::OptimizerState opt = nd::nadam_init(pset, tc.lr0, tc.decay);

    ModelParams grad_holder = zero_params(cfg);
    nd::ParamSet gset = param_set(grad_holder);

    const int folds = std::max(1, std::min<int>(tc.folds, static_cast<int>(usable.size())));
    const int K = cfg.blocks();

    double best_val = std::numeric_limits<double>::infinity();
    std::vector<Matrix> best_snapshot = snapshot(pset);
    result.history.best_epoch = -1;

    for (int epoch = 0; epoch < tc.epochs; ++epoch) {
        const int val_fold = epoch % folds;
        std::vector<int> train_seqs, val_seqs;
        for (std::size_t i = 0; i < usable.size(); ++i) {
            if (folds > 1 && static_cast<int>(i % folds) == val_fold)
                val_seqs.push_back(usable[i]);
            else
                train_seqs.push_back(usable[i]);
        }
        if (val_seqs.empty()) val_seqs = train_seqs;

        for (long done = 0; done < tc.samples_per_epoch; done += tc.batch) {
            const int bsz = static_cast<int>(
                std::min<long>(tc.batch, tc.samples_per_epoch - done));

            std::vector<Matrix> inputs, targets;
            inputs.reserve(bsz);
            for (int b = 0; b < bsz; ++b) {
                const int si = train_seqs[sample_rng.uniform_int(train_seqs.size())];
                inputs.push_back(
                    motion::window_sample(data[si], cfg.T, K, cfg.tau, sample_rng).full);
            }
            targets = inputs;
            if (tc.class_masking)
                mask_for_classification(inputs, tc.label_channels, mask_rng);

            for (auto& g : gset) std::fill(g.value->data.begin(), g.value->data.end(), 0.0);
            double loss = 0.0;
            for (int b = 0; b < bsz; ++b)
                loss += train_loss_and_grad(result.params, cfg, inputs[b], targets[b],
                                            grad_holder);
            loss /= bsz;

            std::vector<Matrix> grads = snapshot(gset);
            scale_grads(grads, 1.0 / bsz);
            nd::nadam_step(opt, pset, grads);
            result.history.step_loss.push_back(loss);
        }

        // end-of-epoch validation on a fresh deterministic stream
        Rng val_rng = master.fork(1000 + static_cast<std::uint64_t>(epoch));
        double val = 0.0;
        for (int s = 0; s < tc.val_samples; ++s) {
            const int si = val_seqs[val_rng.uniform_int(val_seqs.size())];
            const Matrix w = motion::window_sample(data[si], cfg.T, K, cfg.tau, val_rng).full;
            val += train_loss(result.params, cfg, w, w);
        }
        val /= tc.val_samples;
        result.history.val_loss.push_back(val);
        if (val < best_val) {
            best_val = val;
            best_snapshot = snapshot(pset);
            result.history.best_epoch = epoch;
        }
    }

    restore(pset, best_snapshot);
    return result;
}

}  // namespace hs2s::model
