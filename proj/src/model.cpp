#include "hs2s/model.hpp"

#include <algorithm>
#include <cmath>

#include "model_detail.hpp"

namespace hs2s::model {

using nd::Activation;
using nd::Matrix;
using nd::Vec;

void ArchConfig::validate() const {
    if (T < 1 || tau < 1 || T % tau != 0)
        throw ArgumentError("arch: tau must divide T (T=" + std::to_string(T) +
                            ", tau=" + std::to_string(tau) + ")");
    if (n < 1 || d < 1 || sub_hidden < 1 || dec_hidden < 1)
        throw ArgumentError("arch: dimensions must be >= 1");
    if (variant == Variant::kHSeq2Seq && (fixed_j < 1 || fixed_j > blocks()))
        throw ArgumentError("arch: fixed_j out of range for h_seq2seq");
}

namespace {

Matrix glorot_uniform(int rows, int cols, Rng& rng) {
    Matrix m(rows, cols);
    const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
    for (auto& v : m.data) v = rng.uniform(-limit, limit);
    return m;
}

Matrix recurrent_uniform(int dim, Rng& rng) {
    Matrix m(dim, dim);
    const double limit = 1.0 / std::sqrt(static_cast<double>(dim));
    for (auto& v : m.data) v = rng.uniform(-limit, limit);
    return m;
}

nd::GruParams init_gru(int input_dim, int hidden_dim, Rng& rng) {
    nd::GruParams p = nd::GruParams::zeros(input_dim, hidden_dim);
    p.Wz = glorot_uniform(hidden_dim, input_dim, rng);
    p.Wr = glorot_uniform(hidden_dim, input_dim, rng);
    p.Wh = glorot_uniform(hidden_dim, input_dim, rng);
    p.Uz = recurrent_uniform(hidden_dim, rng);
    p.Ur = recurrent_uniform(hidden_dim, rng);
    p.Uh = recurrent_uniform(hidden_dim, rng);
    return p;
}

nd::DenseParams init_dense(int out, int in, Activation act, Rng& rng) {
    nd::DenseParams p;
    p.weight = glorot_uniform(out, in, rng);
    p.bias = Matrix(out, 1);
    p.act = act;
    return p;
}

}  // namespace

ModelParams init_params(const ArchConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    Rng rng(seed);
    ModelParams p;
    p.sub = init_gru(cfg.d, cfg.sub_hidden, rng);
    p.top = init_gru(cfg.sub_hidden, cfg.n, rng);
    if (cfg.n != cfg.dec_hidden)
        p.latent_proj = init_dense(cfg.dec_hidden, cfg.n, Activation::kLinear, rng);
    p.dec = init_gru(1, cfg.dec_hidden, rng);
    p.pose1 = init_dense(cfg.dec_hidden, cfg.dec_hidden, cfg.act, rng);
    p.pose2 = init_dense(cfg.d, cfg.dec_hidden, cfg.act, rng);
    p.res1 = init_gru(cfg.dec_hidden, cfg.dec_hidden, rng);
    p.res2 = init_gru(cfg.dec_hidden, cfg.dec_hidden, rng);
    p.res_out = init_dense(cfg.d, cfg.dec_hidden, cfg.act, rng);
    return p;
}

ModelParams zero_params(const ArchConfig& cfg) {
    ModelParams p;
    p.sub = nd::GruParams::zeros(cfg.d, cfg.sub_hidden);
    p.top = nd::GruParams::zeros(cfg.sub_hidden, cfg.n);
    if (cfg.n != cfg.dec_hidden) {
        nd::DenseParams proj;
        proj.weight = Matrix(cfg.dec_hidden, cfg.n);
        proj.bias = Matrix(cfg.dec_hidden, 1);
        proj.act = Activation::kLinear;
        p.latent_proj = std::move(proj);
    }
    p.dec = nd::GruParams::zeros(1, cfg.dec_hidden);
    p.pose1 = {Matrix(cfg.dec_hidden, cfg.dec_hidden), Matrix(cfg.dec_hidden, 1), cfg.act};
    p.pose2 = {Matrix(cfg.d, cfg.dec_hidden), Matrix(cfg.d, 1), cfg.act};
    p.res1 = nd::GruParams::zeros(cfg.dec_hidden, cfg.dec_hidden);
    p.res2 = nd::GruParams::zeros(cfg.dec_hidden, cfg.dec_hidden);
    p.res_out = {Matrix(cfg.d, cfg.dec_hidden), Matrix(cfg.d, 1), cfg.act};
    return p;
}

nd::ParamSet param_set(ModelParams& p) {
    nd::ParamSet set;
    nd::append(set, nd::param_set(p.sub, "sub"));
    nd::append(set, nd::param_set(p.top, "top"));
    if (p.latent_proj) nd::append(set, nd::param_set(*p.latent_proj, "proj"));
    nd::append(set, nd::param_set(p.dec, "dec"));
    nd::append(set, nd::param_set(p.pose1, "pose1"));
    nd::append(set, nd::param_set(p.pose2, "pose2"));
    nd::append(set, nd::param_set(p.res1, "res1"));
    nd::append(set, nd::param_set(p.res2, "res2"));
    nd::append(set, nd::param_set(p.res_out, "res_out"));
    return set;
}

Matrix repeat_unit(const Matrix& seq, int tau, int T) {
    if (tau < 1 || T % tau != 0 || seq.rows != T / tau)
        throw ArgumentError("repeat_unit: expected " + std::to_string(T / tau) +
                            " rows, got " + std::to_string(seq.rows));
    Matrix out(T, seq.cols);
    for (int k = 0; k < seq.rows; ++k)
        for (int i = 0; i < tau; ++i)
            std::copy_n(seq.row(k), seq.cols, out.row(k * tau + i));
    return out;
}

namespace detail {

Vec sub_encode_block(const ModelParams& p, const ArchConfig& cfg, const double* frames,
                     int tau, std::vector<nd::GruStepCache>* caches) {
    Vec h(cfg.sub_hidden, 0.0);
    Vec x(cfg.d);
    for (int t = 0; t < tau; ++t) {
        std::copy_n(frames + static_cast<std::size_t>(t) * cfg.d, cfg.d, x.begin());
        if (caches != nullptr) {
            caches->emplace_back();
            h = nd::gru_step(p.sub, x, h, cfg.act, caches->back());
        } else {
            h = nd::gru_step(p.sub, x, h, cfg.act);
        }
    }
    return h;
}

// Higher-encoder pass over sub-encodings; returns all states.
std::vector<Vec> top_encode(const ModelParams& p, const ArchConfig& cfg,
                            const std::vector<Vec>& sub_encodings,
                            std::vector<nd::GruStepCache>* caches) {
    std::vector<Vec> states;
    states.reserve(sub_encodings.size());
    Vec h(cfg.n, 0.0);
    for (const Vec& e : sub_encodings) {
        if (caches != nullptr) {
            caches->emplace_back();
            h = nd::gru_step(p.top, e, h, Activation::kTanh, caches->back());
        } else {
            h = nd::gru_step(p.top, e, h, Activation::kTanh);
        }
        states.push_back(h);
    }
    return states;
}

Matrix padded_input(const ArchConfig& cfg, const Matrix& X) {
    const int jt = X.rows;
    Matrix padded(cfg.T, cfg.d);
    std::copy(X.data.begin(), X.data.end(), padded.data.begin());
    if (cfg.variant == Variant::kBasicPad) {
        for (int t = jt; t < cfg.T; ++t) std::copy_n(X.row(jt - 1), cfg.d, padded.row(t));
    }
    // other variants: zero placeholder frames (already zero-filled)
    return padded;
}

Matrix decode_cached(const ModelParams& p, const ArchConfig& cfg, const Vec& z,
                     DecodeCache* cache) {
    const int K = cfg.blocks();

    // initial decoder state
    Vec h0;
    nd::DenseCache proj_cache;
    if (p.latent_proj) {
        h0 = nd::dense_forward(*p.latent_proj, z, proj_cache);
    } else {
        if (static_cast<int>(z.size()) != cfg.dec_hidden)
            throw ShapeError("decode: latent length != dec_hidden without projection");
        h0 = z;
    }

    // low-level seq2seq decoder, zero inputs
    static const Vec kZeroInput(1, 0.0);
    std::vector<Vec> dec_states;
    dec_states.reserve(K);
    std::vector<nd::GruStepCache> dec_caches(cache != nullptr ? K : 0);
    {
        Vec h = h0;
        for (int k = 0; k < K; ++k) {
            if (cache != nullptr)
                h = nd::gru_step(p.dec, kZeroInput, h, cfg.act, dec_caches[k]);
            else
                h = nd::gru_step(p.dec, kZeroInput, h, cfg.act);
            dec_states.push_back(h);
        }
    }

    // anchor poses
    Matrix anchors(K, cfg.d);
    std::vector<nd::DenseCache> pose1_caches(cache != nullptr ? K : 0);
    std::vector<nd::DenseCache> pose2_caches(cache != nullptr ? K : 0);
    for (int k = 0; k < K; ++k) {
        Vec hidden, pose;
        if (cache != nullptr) {
            hidden = nd::dense_forward(p.pose1, dec_states[k], pose1_caches[k]);
            pose = nd::dense_forward(p.pose2, hidden, pose2_caches[k]);
        } else {
            hidden = nd::dense_forward(p.pose1, dec_states[k]);
            pose = nd::dense_forward(p.pose2, hidden);
        }
        std::copy(pose.begin(), pose.end(), anchors.row(k));
    }

    // residual pathway: repeated decoder sequence -> two GRUs -> readout
    Matrix dec_seq(K, cfg.dec_hidden);
    for (int k = 0; k < K; ++k) std::copy(dec_states[k].begin(), dec_states[k].end(), dec_seq.row(k));
    const Matrix res_in = repeat_unit(dec_seq, cfg.tau, cfg.T);

    std::vector<nd::GruStepCache> res1_caches(cache != nullptr ? cfg.T : 0);
    std::vector<nd::GruStepCache> res2_caches(cache != nullptr ? cfg.T : 0);
    std::vector<nd::DenseCache> out_caches(cache != nullptr ? cfg.T : 0);

    Matrix output = repeat_unit(anchors, cfg.tau, cfg.T);
    {
        Vec h1(cfg.dec_hidden, 0.0), h2(cfg.dec_hidden, 0.0);
        Vec x(cfg.dec_hidden);
        for (int t = 0; t < cfg.T; ++t) {
            std::copy_n(res_in.row(t), cfg.dec_hidden, x.begin());
            Vec residual;
            if (cache != nullptr) {
                h1 = nd::gru_step(p.res1, x, h1, cfg.act, res1_caches[t]);
                h2 = nd::gru_step(p.res2, h1, h2, cfg.act, res2_caches[t]);
                residual = nd::dense_forward(p.res_out, h2, out_caches[t]);
            } else {
                h1 = nd::gru_step(p.res1, x, h1, cfg.act);
                h2 = nd::gru_step(p.res2, h1, h2, cfg.act);
                residual = nd::dense_forward(p.res_out, h2);
            }
            double* row = output.row(t);
            for (int c = 0; c < cfg.d; ++c) row[c] += residual[c];
        }
    }

    if (cache != nullptr) {
        cache->proj = std::move(proj_cache);
        cache->dec = std::move(dec_caches);
        cache->pose1 = std::move(pose1_caches);
        cache->pose2 = std::move(pose2_caches);
        cache->res1 = std::move(res1_caches);
        cache->res2 = std::move(res2_caches);
        cache->res_out = std::move(out_caches);
    }
    return output;
}

}  // namespace detail

LatentCode encode_prefix(const ModelParams& p, const ArchConfig& cfg, const Matrix& X) {
    cfg.validate();
    if (X.cols != cfg.d)
        throw ShapeError("encode_prefix: got " + std::to_string(X.cols) +
                         " channels, expected " + std::to_string(cfg.d));
    if (X.rows < cfg.tau || X.rows > cfg.T || X.rows % cfg.tau != 0)
        throw ArgumentError("encode_prefix: prefix length " + std::to_string(X.rows) +
                            " is not a multiple of tau in [tau, T]");
    const int j = X.rows / cfg.tau;
    const int K = cfg.blocks();

    const Matrix padded = detail::padded_input(cfg, X);
    std::vector<Vec> sub_encodings;
    sub_encodings.reserve(K);
    for (int k = 0; k < K; ++k)
        sub_encodings.push_back(detail::sub_encode_block(
            p, cfg, padded.row(k * cfg.tau), cfg.tau, nullptr));
    const std::vector<Vec> states = detail::top_encode(p, cfg, sub_encodings, nullptr);

    LatentCode code;
    code.prefix_len = j * cfg.tau;
    code.z = cfg.variant == Variant::kBasicPad ? states[K - 1] : states[j - 1];
    return code;
}

std::vector<LatentCode> encode_all_prefixes(const ModelParams& p, const ArchConfig& cfg,
                                            const Matrix& full) {
    cfg.validate();
    if (full.rows != cfg.T || full.cols != cfg.d)
        throw ShapeError("encode_all_prefixes: window must be T x d");
    if (cfg.variant == Variant::kBasicPad) {
        // per-prefix padding differs; no shared pass
        std::vector<LatentCode> codes;
        for (int j = 1; j <= cfg.blocks(); ++j) {
            Matrix X(j * cfg.tau, cfg.d);
            std::copy_n(full.data.begin(), X.data.size(), X.data.begin());
            codes.push_back(encode_prefix(p, cfg, X));
        }
        return codes;
    }
    const int K = cfg.blocks();
    std::vector<Vec> sub_encodings;
    sub_encodings.reserve(K);
    for (int k = 0; k < K; ++k)
        sub_encodings.push_back(
            detail::sub_encode_block(p, cfg, full.row(k * cfg.tau), cfg.tau, nullptr));
    const std::vector<Vec> states = detail::top_encode(p, cfg, sub_encodings, nullptr);
    std::vector<LatentCode> codes(K);
    for (int j = 1; j <= K; ++j) codes[j - 1] = {states[j - 1], j * cfg.tau};
    return codes;
}

Matrix decode(const ModelParams& p, const ArchConfig& cfg, const LatentCode& code) {
    cfg.validate();
    if (static_cast<int>(code.z.size()) != cfg.n)
        throw ArgumentError("decode: latent length " + std::to_string(code.z.size()) +
                            " != n=" + std::to_string(cfg.n));
    return detail::decode_cached(p, cfg, code.z, nullptr);
}

Matrix build_target(const Matrix& full, int tau, int j) {
    if (tau < 1 || full.rows % tau != 0)
        throw ArgumentError("build_target: tau must divide the window length");
    const int K = full.rows / tau;
    if (j < 1 || j > K) throw ArgumentError("build_target: j out of range");
    Matrix t(full.rows, full.cols);
    const int jt = j * tau;
    std::copy_n(full.data.begin(), static_cast<std::size_t>(jt) * full.cols, t.data.begin());
    for (int row = jt; row < full.rows; ++row)
        std::copy_n(full.row(jt - 1), full.cols, t.row(row));
    return t;
}

std::vector<Matrix> build_targets(const Matrix& full, int tau) {
    std::vector<Matrix> out;
    const int K = full.rows / tau;
    out.reserve(K);
    for (int j = 1; j <= K; ++j) out.push_back(build_target(full, tau, j));
    return out;
}

double multi_loss(const ModelParams& p, const ArchConfig& cfg, const Matrix& full) {
    cfg.validate();
    if (full.rows != cfg.T || full.cols != cfg.d)
        throw ShapeError("multi_loss: window must be T x d");
    const int K = cfg.blocks();
    const std::vector<LatentCode> codes = encode_all_prefixes(p, cfg, full);
    double acc = 0.0;
    for (int j = 1; j <= K; ++j) {
        const Matrix out = decode(p, cfg, codes[j - 1]);
        acc += nd::mae_loss(out, build_target(full, cfg.tau, j));
    }
    return acc / K;
}

void mask_for_classification(std::vector<Matrix>& batch, int label_channels, Rng& rng) {
    if (label_channels < 1) throw ArgumentError("mask_for_classification: no label channels");
    const int N = static_cast<int>(batch.size());
    if (N == 0) return;
    for (const auto& w : batch)
        if (w.cols <= label_channels)
            throw ArgumentError("mask_for_classification: batch without label channels");

    std::vector<int> order(N);
    for (int i = 0; i < N; ++i) order[i] = i;
    // Fisher-Yates with one draw per swap
    for (int i = N - 1; i > 0; --i) {
        const int k = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(i + 1)));
        std::swap(order[i], order[k]);
    }
    const int base = N / 3, rem = N % 3;
    const int n_label = base + (rem > 0 ? 1 : 0);  // labels zeroed
    const int n_pose = base + (rem > 1 ? 1 : 0);   // poses zeroed
    for (int idx = 0; idx < N; ++idx) {
        Matrix& w = batch[order[idx]];
        const int pose_cols = w.cols - label_channels;
        if (idx < n_label) {
            for (int t = 0; t < w.rows; ++t)
                std::fill_n(w.row(t) + pose_cols, label_channels, 0.0);
        } else if (idx < n_label + n_pose) {
            for (int t = 0; t < w.rows; ++t) std::fill_n(w.row(t), pose_cols, 0.0);
        }
    }
}

}  // namespace hs2s::model
