#include "hs2s/completion.hpp"

#include <algorithm>
#include <cmath>

namespace hs2s::completion {

using model::ArchConfig;
using model::LatentCode;
using model::ModelParams;
using motion::SampleWindow;
using nd::Matrix;
using nd::Vec;

const char* pair_mode_name(PairMode mode) {
    switch (mode) {
        case PairMode::kCompletion: return "completion";
        case PairMode::kMatching: return "matching";
        case PairMode::kLabelRecovery: return "label_recovery";
    }
    return "?";
}

Vec latent_diff(const ModelParams& p, const ArchConfig& cfg, const SampleWindow& pair,
                PairMode mode) {
    if (pair.full.rows != cfg.T)
        throw ArgumentError("latent_diff: window length != T");
    const LatentCode zx = model::encode_prefix(p, cfg, pair.prefix());
    LatentCode zc;
    if (mode == PairMode::kCompletion) {
        zc = model::encode_prefix(p, cfg, pair.full);
    } else if (mode == PairMode::kMatching) {
        // Y encoded as its own sequence, zero-padded inside the window
        zc = model::encode_prefix(p, cfg, pair.suffix());
    } else {
        throw ArgumentError("latent_diff: label pairs are built via build_label_pairs");
    }
    Vec d(zc.z.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = zc.z[i] - zx.z[i];
    return d;
}

PatternPairSet build_pairs(const ModelParams& p, const ArchConfig& cfg,
                           const std::vector<SampleWindow>& windows, int j, PairMode mode) {
    PatternPairSet set;
    set.j = j;
    set.mode = mode;
    set.pairs.reserve(windows.size());
    for (const auto& w : windows) {
        if (w.j != j) throw ArgumentError("build_pairs: window prefix index != j");
        CodePair cp;
        cp.p = model::encode_prefix(p, cfg, w.prefix()).z;
        if (mode == PairMode::kCompletion)
            cp.c = model::encode_prefix(p, cfg, w.full).z;
        else
            cp.c = model::encode_prefix(p, cfg, w.suffix()).z;
        set.pairs.push_back(std::move(cp));
    }
    return set;
}

PatternPairSet build_label_pairs(const ModelParams& p, const ArchConfig& cfg,
                                 const std::vector<SampleWindow>& windows,
                                 int label_channels) {
    if (label_channels < 1)
        throw ArgumentError("build_label_pairs: label_channels must be >= 1");
    PatternPairSet set;
    set.j = cfg.blocks();
    set.mode = PairMode::kLabelRecovery;
    set.pairs.reserve(windows.size());
    for (const auto& w : windows) {
        if (w.full.rows != cfg.T)
            throw ArgumentError("build_label_pairs: windows must be full length");
        Matrix unlabeled = w.full;
        const int pose_cols = unlabeled.cols - label_channels;
        for (int t = 0; t < unlabeled.rows; ++t)
            std::fill_n(unlabeled.row(t) + pose_cols, label_channels, 0.0);
        CodePair cp;
        cp.p = model::encode_prefix(p, cfg, unlabeled).z;
        cp.c = model::encode_prefix(p, cfg, w.full).z;
        set.pairs.push_back(std::move(cp));
    }
    return set;
}

CompletionVector compute_vj(const PatternPairSet& pairs) {
    if (pairs.pairs.empty()) throw ArgumentError("compute_vj: empty pair set");
    const std::size_t n = pairs.pairs.front().p.size();
    CompletionVector cv;
    cv.j = pairs.j;
    cv.mode = pairs.mode;
    cv.sample_count = static_cast<long>(pairs.pairs.size());
    cv.v.assign(n, 0.0);
    cv.sigma.assign(n, 0.0);
    for (const auto& pr : pairs.pairs)
        for (std::size_t i = 0; i < n; ++i) cv.v[i] += pr.c[i] - pr.p[i];
    for (std::size_t i = 0; i < n; ++i) cv.v[i] /= static_cast<double>(cv.sample_count);
    for (const auto& pr : pairs.pairs)
        for (std::size_t i = 0; i < n; ++i) {
            const double d = pr.c[i] - pr.p[i] - cv.v[i];
            cv.sigma[i] += d * d;
        }
    for (std::size_t i = 0; i < n; ++i)
        cv.sigma[i] = std::sqrt(cv.sigma[i] / static_cast<double>(cv.sample_count));
    return cv;
}

CompletionVector compute_vj(const ModelParams& p, const ArchConfig& cfg,
                            const std::vector<SampleWindow>& windows, int j, PairMode mode) {
    if (windows.empty()) throw ArgumentError("compute_vj: empty sample set");
    return compute_vj(build_pairs(p, cfg, windows, j, mode));
}

LatentCode complete_add(const LatentCode& z, const CompletionVector& cv,
                        const ArchConfig& cfg) {
    if (z.prefix_len != cv.j * cfg.tau)
        throw ArgumentError("complete_add: code prefix length " +
                            std::to_string(z.prefix_len) + " != j*tau for j=" +
                            std::to_string(cv.j));
    if (z.z.size() != cv.v.size()) throw ArgumentError("complete_add: dimension mismatch");
    LatentCode out;
    out.prefix_len = cfg.T;
    out.z.resize(z.z.size());
    for (std::size_t i = 0; i < z.z.size(); ++i) out.z[i] = z.z[i] + cv.v[i];
    return out;
}

FnCompleter fit_fn(const PatternPairSet& pairs, const FnSchedule& schedule) {
    if (pairs.pairs.empty()) throw ArgumentError("fit_fn: empty pair set");
    const int n = static_cast<int>(pairs.pairs.front().p.size());
    for (const auto& pr : pairs.pairs)
        if (static_cast<int>(pr.p.size()) != n || static_cast<int>(pr.c.size()) != n)
            throw ArgumentError("fit_fn: inconsistent code dimensions");

    FnCompleter fn;
    fn.trained_j = pairs.j;
    fn.mode = pairs.mode;
    fn.layer.act = nd::Activation::kLinear;
    fn.layer.bias = Matrix(n, 1);
    // identity start: complete codes sit near their partial codes
    fn.layer.weight = Matrix(n, n);
    for (int i = 0; i < n; ++i) fn.layer.weight.at(i, i) = 1.0;
    Rng rng(schedule.seed);

    nd::ParamSet pset = nd::param_set(fn.layer, "fn");
    nd::OptimizerState opt = nd::nadam_init(pset, schedule.lr0, 0.0);

    const int N = static_cast<int>(pairs.pairs.size());
    std::vector<int> order(N);
    for (int i = 0; i < N; ++i) order[i] = i;

    nd::DenseParams grads;
    grads.weight = Matrix(n, n);
    grads.bias = Matrix(n, 1);

    for (int epoch = 0; epoch < schedule.epochs; ++epoch) {
        // step decay, rate 0.5
        opt.lr0 = schedule.lr0 * std::pow(0.5, epoch / std::max(1, schedule.halve_every));
        for (int i = N - 1; i > 0; --i) {
            const int k = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(i + 1)));
            std::swap(order[i], order[k]);
        }
        for (int start = 0; start < N; start += schedule.batch) {
            const int bsz = std::min(schedule.batch, N - start);
            std::fill(grads.weight.data.begin(), grads.weight.data.end(), 0.0);
            std::fill(grads.bias.data.begin(), grads.bias.data.end(), 0.0);
            for (int b = 0; b < bsz; ++b) {
                const CodePair& pr = pairs.pairs[order[start + b]];
                nd::DenseCache cache;
                const Vec out = nd::dense_forward(fn.layer, pr.p, cache);
                Vec dy(n);
                const double inv = 1.0 / (static_cast<double>(n) * bsz);
                for (int i = 0; i < n; ++i) {
                    const double d = out[i] - pr.c[i];
                    dy[i] = d > 0.0 ? inv : (d < 0.0 ? -inv : 0.0);
                }
                nd::dense_backward(fn.layer, cache, dy, grads, nullptr);
            }
            std::vector<Matrix> g = {grads.weight, grads.bias};
            nd::nadam_step(opt, pset, g);
        }
    }
    return fn;
}

Vec apply_fn(const FnCompleter& fn, const Vec& p) { return nd::dense_forward(fn.layer, p); }

double fn_eval_mae(const FnCompleter& fn, const PatternPairSet& pairs) {
    if (pairs.pairs.empty()) throw ArgumentError("fn_eval_mae: empty pair set");
    double acc = 0.0;
    std::size_t count = 0;
    for (const auto& pr : pairs.pairs) {
        const Vec out = apply_fn(fn, pr.p);
        for (std::size_t i = 0; i < out.size(); ++i) acc += std::abs(out[i] - pr.c[i]);
        count += out.size();
    }
    return acc / static_cast<double>(count);
}

nd::Matrix predict_full(const ModelParams& p, const ArchConfig& cfg,
                        const Completer& completer, const Matrix& X) {
    const LatentCode zx = model::encode_prefix(p, cfg, X);
    LatentCode zc;
    if (completer.add != nullptr) {
        zc = complete_add(zx, *completer.add, cfg);
    } else if (completer.fn != nullptr) {
        if (zx.prefix_len != completer.fn->trained_j * cfg.tau)
            throw ArgumentError("predict_full: prefix does not match the trained j");
        zc.z = apply_fn(*completer.fn, zx.z);
        zc.prefix_len = cfg.T;
    } else {
        throw ArgumentError("predict_full: no completer provided");
    }
    return model::decode(p, cfg, zc);
}

nd::Matrix generate_noisy(const ModelParams& p, const ArchConfig& cfg, const FnCompleter& fn,
                          const Vec& sigma, const Matrix& X, double scale, Rng& rng) {
    if (scale < 0.0) throw ArgumentError("generate_noisy: scale must be >= 0");
    if (sigma.empty()) throw ArgumentError("generate_noisy: missing sigma");
    const LatentCode zx = model::encode_prefix(p, cfg, X);
    if (sigma.size() != zx.z.size())
        throw ArgumentError("generate_noisy: sigma dimension mismatch");
    LatentCode zc;
    zc.prefix_len = cfg.T;
    zc.z = apply_fn(fn, zx.z);
    for (std::size_t i = 0; i < zc.z.size(); ++i)
        zc.z[i] += scale * sigma[i] * rng.normal();
    return model::decode(p, cfg, zc);
}

std::vector<Matrix> interpolate(const ModelParams& p, const ArchConfig& cfg,
                                const LatentCode& zA, const LatentCode& zB, int k) {
    if (k < 1) throw ArgumentError("interpolate: k must be >= 1");
    if (zA.z.size() != zB.z.size()) throw ArgumentError("interpolate: dimension mismatch");
    std::vector<Matrix> out;
    out.reserve(k + 1);
    for (int step = 0; step <= k; ++step) {
        LatentCode z;
        z.prefix_len = cfg.T;
        // exact endpoints; difference form keeps zA == zB bit-stable
        if (step == 0) {
            z.z = zA.z;
        } else if (step == k) {
            z.z = zB.z;
        } else {
            const double alpha = static_cast<double>(step) / k;
            z.z.resize(zA.z.size());
            for (std::size_t i = 0; i < z.z.size(); ++i)
                z.z[i] = zA.z[i] + alpha * (zB.z[i] - zA.z[i]);
        }
        out.push_back(model::decode(p, cfg, z));
    }
    return out;
}

Vec read_label_probs(const Matrix& decoded, int label_channels) {
    if (label_channels < 1 || decoded.cols < label_channels)
        throw ArgumentError("read_label_probs: missing label channels");
    const int pose_cols = decoded.cols - label_channels;
    Vec probs(label_channels, 0.0);
    for (int t = 0; t < decoded.rows; ++t) {
        const double* row = decoded.row(t) + pose_cols;
        for (int c = 0; c < label_channels; ++c) probs[c] += row[c];
    }
    double sum = 0.0;
    for (auto& v : probs) {
        v = std::max(0.0, v / decoded.rows);
        sum += v;
    }
    if (sum <= 0.0) {
        std::fill(probs.begin(), probs.end(), 1.0 / label_channels);
    } else {
        for (auto& v : probs) v /= sum;
    }
    return probs;
}

}  // namespace hs2s::completion
