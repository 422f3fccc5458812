#include <algorithm>
#include <cmath>

#include "model_detail.hpp"

// Hand-derived backward passes. Every forward pass caches its per-step
// activations; the backward walks them in reverse, accumulating parameter
// gradients block by block. No general autodiff.

namespace hs2s::model {

using nd::Activation;
using nd::Matrix;
using nd::Vec;

namespace detail {

namespace {

inline void add_into(Vec& dst, const Vec& src) {
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

}  // namespace

Vec decode_backward(const ModelParams& p, const ArchConfig& cfg, const DecodeCache& cache,
                    const Matrix& d_output, ModelParams& grads) {
    const int K = cfg.blocks();

    // residual pathway, reverse time
    Matrix d_res_in(cfg.T, cfg.dec_hidden);  // gradient at the repeated decoder sequence
    {
        Vec dh1(cfg.dec_hidden, 0.0), dh2(cfg.dec_hidden, 0.0);
        Vec d_residual(cfg.d);
        Vec ds2, ds1, dx;
        for (int t = cfg.T - 1; t >= 0; --t) {
            std::copy_n(d_output.row(t), cfg.d, d_residual.begin());
            nd::dense_backward(p.res_out, cache.res_out[t], d_residual, grads.res_out, &ds2);
            add_into(ds2, dh2);
            nd::gru_step_backward(p.res2, cache.res2[t], cfg.act, ds2, grads.res2, &ds1, dh2);
            add_into(ds1, dh1);
            nd::gru_step_backward(p.res1, cache.res1[t], cfg.act, ds1, grads.res1, &dx, dh1);
            std::copy(dx.begin(), dx.end(), d_res_in.row(t));
        }
    }

    // anchors: gradient of output row t hits anchor block t/tau directly
    // (repeat backward = sum over the tau copies)
    std::vector<Vec> d_dec_state(K, Vec(cfg.dec_hidden, 0.0));
    for (int k = 0; k < K; ++k) {
        Vec d_anchor(cfg.d, 0.0);
        for (int i = 0; i < cfg.tau; ++i) {
            const int t = k * cfg.tau + i;
            const double* row = d_output.row(t);
            for (int c = 0; c < cfg.d; ++c) d_anchor[c] += row[c];
            // repeat backward for the residual input
            const double* rrow = d_res_in.row(t);
            for (int c = 0; c < cfg.dec_hidden; ++c) d_dec_state[k][c] += rrow[c];
        }
        Vec d_hidden, d_state;
        nd::dense_backward(p.pose2, cache.pose2[k], d_anchor, grads.pose2, &d_hidden);
        nd::dense_backward(p.pose1, cache.pose1[k], d_hidden, grads.pose1, &d_state);
        add_into(d_dec_state[k], d_state);
    }

    // low-level decoder, reverse time; zero inputs so dx is dropped
    Vec dh(cfg.dec_hidden, 0.0);
    for (int k = K - 1; k >= 0; --k) {
        add_into(dh, d_dec_state[k]);
        Vec dh_prev;
        nd::gru_step_backward(p.dec, cache.dec[k], cfg.act, dh, grads.dec, nullptr, dh_prev);
        dh = std::move(dh_prev);
    }

    // initial state -> latent
    if (p.latent_proj) {
        Vec dz;
        nd::dense_backward(*p.latent_proj, cache.proj, dh, *grads.latent_proj, &dz);
        return dz;
    }
    return dh;
}

void sub_block_backward(const ModelParams& p, const ArchConfig& cfg,
                        const std::vector<nd::GruStepCache>& caches, int first_cache,
                        const Vec& d_final, ModelParams& grads) {
    Vec dh = d_final;
    for (int t = cfg.tau - 1; t >= 0; --t) {
        Vec dh_prev;
        nd::gru_step_backward(p.sub, caches[first_cache + t], cfg.act, dh, grads.sub,
                              nullptr, dh_prev);
        dh = std::move(dh_prev);
    }
}

namespace {

// One full forward+backward for the shared-pass variants (hs2sae and
// h_seq2seq). Loss terms are selected by the variant. Gradients accumulate.
double shared_pass_loss(const ModelParams& p, const ArchConfig& cfg, const Matrix& input,
                        const Matrix& target, ModelParams* grads) {
    const int K = cfg.blocks();
    const bool want_grad = grads != nullptr;

    // encoder forward with caches
    std::vector<nd::GruStepCache> sub_caches;
    if (want_grad) sub_caches.reserve(static_cast<std::size_t>(K) * cfg.tau);
    std::vector<Vec> sub_encodings;
    sub_encodings.reserve(K);
    for (int k = 0; k < K; ++k)
        sub_encodings.push_back(sub_encode_block(p, cfg, input.row(k * cfg.tau), cfg.tau,
                                                 want_grad ? &sub_caches : nullptr));
    std::vector<nd::GruStepCache> top_caches;
    if (want_grad) top_caches.reserve(K);
    const std::vector<Vec> top_states =
        top_encode(p, cfg, sub_encodings, want_grad ? &top_caches : nullptr);

    // js contributing loss terms, with their targets and output masks
    struct Term {
        int j;
        Matrix target;
        int first_row;  // rows [first_row, T) scored
    };
    std::vector<Term> terms;
    double norm = 0.0;
    if (cfg.variant == Variant::kHSeq2Seq) {
        Term t;
        t.j = cfg.fixed_j;
        t.target = target;
        t.first_row = cfg.seq_target == SeqTarget::kSuffix ? cfg.fixed_j * cfg.tau : 0;
        if (t.first_row >= cfg.T)
            throw ArgumentError("h_seq2seq: fixed_j leaves no suffix to train on");
        terms.push_back(std::move(t));
        norm = 1.0;
    } else {
        for (int j = 1; j <= K; ++j)
            terms.push_back({j, build_target(target, cfg.tau, j), 0});
        norm = static_cast<double>(K);
    }

    double loss = 0.0;
    std::vector<Vec> d_top(K, Vec(cfg.n, 0.0));
    for (const Term& term : terms) {
        DecodeCache dcache;
        const Matrix out = decode_cached(p, cfg, top_states[term.j - 1],
                                         want_grad ? &dcache : nullptr);
        // masked MAE over rows [first_row, T)
        const std::size_t offset = static_cast<std::size_t>(term.first_row) * cfg.d;
        const std::size_t count = out.data.size() - offset;
        double acc = 0.0;
        for (std::size_t i = offset; i < out.data.size(); ++i)
            acc += std::abs(out.data[i] - term.target.data[i]);
        loss += acc / static_cast<double>(count) / norm;

        if (want_grad) {
            Matrix d_out(cfg.T, cfg.d);
            const double inv = 1.0 / static_cast<double>(count) / norm;
            for (std::size_t i = offset; i < out.data.size(); ++i) {
                const double d = out.data[i] - term.target.data[i];
                d_out.data[i] = d > 0.0 ? inv : (d < 0.0 ? -inv : 0.0);
            }
            const Vec dz = decode_backward(p, cfg, dcache, d_out, *grads);
            add_into(d_top[term.j - 1], dz);
        }
    }

    if (want_grad) {
        // higher encoder BPTT with per-step injected gradients
        std::vector<Vec> d_sub(K);
        Vec dh(cfg.n, 0.0);
        for (int k = K - 1; k >= 0; --k) {
            add_into(dh, d_top[k]);
            Vec dh_prev;
            nd::gru_step_backward(p.top, top_caches[k], Activation::kTanh, dh, grads->top,
                                  &d_sub[k], dh_prev);
            dh = std::move(dh_prev);
        }
        for (int k = 0; k < K; ++k)
            sub_block_backward(p, cfg, sub_caches, k * cfg.tau, d_sub[k], *grads);
    }
    return loss;
}

// basic_pad: per prefix the padding (and hence every sub-encoding past j)
// differs, so each j gets its own encoder pass.
double basic_pad_loss(const ModelParams& p, const ArchConfig& cfg, const Matrix& input,
                      const Matrix& target, ModelParams* grads) {
    const int K = cfg.blocks();
    const bool want_grad = grads != nullptr;
    double loss = 0.0;

    for (int j = 1; j <= K; ++j) {
        Matrix X(j * cfg.tau, cfg.d);
        std::copy_n(input.data.begin(), X.data.size(), X.data.begin());
        const Matrix padded = padded_input(cfg, X);

        std::vector<nd::GruStepCache> sub_caches;
        if (want_grad) sub_caches.reserve(static_cast<std::size_t>(K) * cfg.tau);
        std::vector<Vec> sub_encodings;
        for (int k = 0; k < K; ++k)
            sub_encodings.push_back(sub_encode_block(p, cfg, padded.row(k * cfg.tau), cfg.tau,
                                                     want_grad ? &sub_caches : nullptr));
        std::vector<nd::GruStepCache> top_caches;
        const std::vector<Vec> top_states =
            top_encode(p, cfg, sub_encodings, want_grad ? &top_caches : nullptr);

        DecodeCache dcache;
        const Matrix out =
            decode_cached(p, cfg, top_states[K - 1], want_grad ? &dcache : nullptr);
        const Matrix tgt = build_target(target, cfg.tau, j);
        loss += nd::mae_loss(out, tgt) / K;

        if (want_grad) {
            Matrix d_out = nd::mae_loss_grad(out, tgt);
            for (auto& v : d_out.data) v /= K;
            const Vec dz = decode_backward(p, cfg, dcache, d_out, *grads);

            std::vector<Vec> d_sub(K);
            Vec dh = dz;  // gradient enters at the final state only
            for (int k = K - 1; k >= 0; --k) {
                Vec dh_prev;
                nd::gru_step_backward(p.top, top_caches[k], Activation::kTanh, dh,
                                      grads->top, &d_sub[k], dh_prev);
                dh = std::move(dh_prev);
            }
            for (int k = 0; k < K; ++k)
                sub_block_backward(p, cfg, sub_caches, k * cfg.tau, d_sub[k], *grads);
        }
    }
    return loss;
}

double dispatch(const ModelParams& p, const ArchConfig& cfg, const Matrix& input,
                const Matrix& target, ModelParams* grads) {
    cfg.validate();
    if (input.rows != cfg.T || input.cols != cfg.d)
        throw ShapeError("train loss: input window must be T x d");
    if (target.rows != cfg.T || target.cols != cfg.d)
        throw ShapeError("train loss: target window must be T x d");
    if (cfg.variant == Variant::kBasicPad) return basic_pad_loss(p, cfg, input, target, grads);
    return shared_pass_loss(p, cfg, input, target, grads);
}

}  // namespace

}  // namespace detail

double train_loss(const ModelParams& p, const ArchConfig& cfg, const Matrix& input,
                  const Matrix& target) {
    return detail::dispatch(p, cfg, input, target, nullptr);
}

double train_loss_and_grad(const ModelParams& p, const ArchConfig& cfg, const Matrix& input,
                           const Matrix& target, ModelParams& grads) {
    return detail::dispatch(p, cfg, input, target, &grads);
}

}  // namespace hs2s::model
