#include "hs2s/ndmath.hpp"

#include <cmath>
#include <cstddef>

namespace hs2s::nd {

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline double activate(double x, Activation a) {
    return a == Activation::kTanh ? std::tanh(x) : x;
}

// out = W x
void matvec(const Matrix& W, const double* x, double* out) {
    for (int i = 0; i < W.rows; ++i) {
        const double* w = W.row(i);
        double acc = 0.0;
        for (int j = 0; j < W.cols; ++j) acc += w[j] * x[j];
        out[i] = acc;
    }
}

// out += W x
void matvec_acc(const Matrix& W, const double* x, double* out) {
    for (int i = 0; i < W.rows; ++i) {
        const double* w = W.row(i);
        double acc = 0.0;
        for (int j = 0; j < W.cols; ++j) acc += w[j] * x[j];
        out[i] += acc;
    }
}

// dx += W^T dy
void matTvec_acc(const Matrix& W, const double* dy, double* dx) {
    for (int i = 0; i < W.rows; ++i) {
        const double* w = W.row(i);
        const double g = dy[i];
        if (g == 0.0) continue;
        for (int j = 0; j < W.cols; ++j) dx[j] += w[j] * g;
    }
}

// G += dy x^T
void outer_acc(Matrix& G, const double* dy, const double* x) {
    for (int i = 0; i < G.rows; ++i) {
        double* g = G.row(i);
        const double d = dy[i];
        if (d == 0.0) continue;
        for (int j = 0; j < G.cols; ++j) g[j] += d * x[j];
    }
}

void check_vec(const char* what, std::size_t got, int want) {
    if (static_cast<int>(got) != want)
        throw ShapeError(std::string(what) + ": length " + std::to_string(got) +
                         ", expected " + std::to_string(want));
}

}  // namespace

bool all_finite(const Matrix& m) {
    for (double v : m.data)
        if (!std::isfinite(v)) return false;
    return true;
}

Vec dense_forward(const DenseParams& p, const Vec& x) {
    DenseCache scratch;
    return dense_forward(p, x, scratch);
}

Vec dense_forward(const DenseParams& p, const Vec& x, DenseCache& cache) {
    check_vec("dense input", x.size(), p.weight.cols);
    if (p.bias.rows != p.weight.rows)
        throw ShapeError("dense bias length != weight rows");
    Vec y(p.weight.rows);
    matvec(p.weight, x.data(), y.data());
    for (int i = 0; i < p.weight.rows; ++i) y[i] = activate(y[i] + p.bias.at(i, 0), p.act);
    cache.x = x;
    cache.y = y;
    return y;
}

void dense_backward(const DenseParams& p, const DenseCache& cache, const Vec& dy,
                    DenseParams& grad, Vec* dx) {
    check_vec("dense dy", dy.size(), p.weight.rows);
    Vec da(dy.size());
    for (std::size_t i = 0; i < dy.size(); ++i) {
        const double dact = p.act == Activation::kTanh ? 1.0 - cache.y[i] * cache.y[i] : 1.0;
        da[i] = dy[i] * dact;
    }
    outer_acc(grad.weight, da.data(), cache.x.data());
    for (std::size_t i = 0; i < da.size(); ++i) grad.bias.at(static_cast<int>(i), 0) += da[i];
    if (dx != nullptr) {
        dx->assign(p.weight.cols, 0.0);
        matTvec_acc(p.weight, da.data(), dx->data());
    }
}

GruParams GruParams::zeros(int input_dim, int hidden_dim) {
    GruParams p;
    p.input_dim = input_dim;
    p.hidden_dim = hidden_dim;
    p.Wz = Matrix(hidden_dim, input_dim);
    p.Wr = Matrix(hidden_dim, input_dim);
    p.Wh = Matrix(hidden_dim, input_dim);
    p.Uz = Matrix(hidden_dim, hidden_dim);
    p.Ur = Matrix(hidden_dim, hidden_dim);
    p.Uh = Matrix(hidden_dim, hidden_dim);
    p.bz = Matrix(hidden_dim, 1);
    p.br = Matrix(hidden_dim, 1);
    p.bh = Matrix(hidden_dim, 1);
    return p;
}

Vec gru_step(const GruParams& p, const Vec& x, const Vec& h, Activation cand) {
    GruStepCache scratch;
    return gru_step(p, x, h, cand, scratch);
}

const Vec& gru_step(const GruParams& p, const Vec& x, const Vec& h, Activation cand,
                    GruStepCache& cache) {
    check_vec("gru input", x.size(), p.input_dim);
    check_vec("gru hidden", h.size(), p.hidden_dim);
    const int H = p.hidden_dim;

    Vec z(H), r(H), hc(H), rh(H);
    matvec(p.Wz, x.data(), z.data());
    matvec_acc(p.Uz, h.data(), z.data());
    matvec(p.Wr, x.data(), r.data());
    matvec_acc(p.Ur, h.data(), r.data());
    for (int i = 0; i < H; ++i) {
        z[i] = sigmoid(z[i] + p.bz.at(i, 0));
        r[i] = sigmoid(r[i] + p.br.at(i, 0));
        rh[i] = r[i] * h[i];
    }
    matvec(p.Wh, x.data(), hc.data());
    matvec_acc(p.Uh, rh.data(), hc.data());
    Vec hn(H);
    for (int i = 0; i < H; ++i) {
        hc[i] = activate(hc[i] + p.bh.at(i, 0), cand);
        hn[i] = (1.0 - z[i]) * h[i] + z[i] * hc[i];
    }

    cache.x = x;
    cache.h_prev = h;
    cache.z = std::move(z);
    cache.r = std::move(r);
    cache.hc = std::move(hc);
    cache.h_new = std::move(hn);
    return cache.h_new;
}

void gru_step_backward(const GruParams& p, const GruStepCache& cache, Activation cand,
                       const Vec& dh_new, GruParams& grad, Vec* dx, Vec& dh_prev) {
    const int H = p.hidden_dim;
    check_vec("gru dh", dh_new.size(), H);

    Vec da_h(H), da_r(H), da_z(H), dh(H), rh(H);
    for (int i = 0; i < H; ++i) {
        const double z = cache.z[i];
        const double hc = cache.hc[i];
        const double hp = cache.h_prev[i];
        const double dhc = dh_new[i] * z;
        const double dz = dh_new[i] * (hc - hp);
        dh[i] = dh_new[i] * (1.0 - z);
        const double dcand = cand == Activation::kTanh ? 1.0 - hc * hc : 1.0;
        da_h[i] = dhc * dcand;
        da_z[i] = dz * z * (1.0 - z);
        rh[i] = cache.r[i] * hp;
    }

    outer_acc(grad.Wh, da_h.data(), cache.x.data());
    outer_acc(grad.Uh, da_h.data(), rh.data());
    Vec drh(H, 0.0);
    matTvec_acc(p.Uh, da_h.data(), drh.data());
    for (int i = 0; i < H; ++i) {
        const double r = cache.r[i];
        const double dr = drh[i] * cache.h_prev[i];
        dh[i] += drh[i] * r;
        da_r[i] = dr * r * (1.0 - r);
        grad.bh.at(i, 0) += da_h[i];
        grad.bz.at(i, 0) += da_z[i];
        grad.br.at(i, 0) += da_r[i];
    }
    outer_acc(grad.Wr, da_r.data(), cache.x.data());
    outer_acc(grad.Ur, da_r.data(), cache.h_prev.data());
    outer_acc(grad.Wz, da_z.data(), cache.x.data());
    outer_acc(grad.Uz, da_z.data(), cache.h_prev.data());
    matTvec_acc(p.Ur, da_r.data(), dh.data());
    matTvec_acc(p.Uz, da_z.data(), dh.data());
    dh_prev = std::move(dh);

    if (dx != nullptr) {
        dx->assign(p.input_dim, 0.0);
        matTvec_acc(p.Wz, da_z.data(), dx->data());
        matTvec_acc(p.Wr, da_r.data(), dx->data());
        matTvec_acc(p.Wh, da_h.data(), dx->data());
    }
}

double mae_loss(const Matrix& pred, const Matrix& target) {
    if (pred.rows != target.rows || pred.cols != target.cols)
        throw ShapeError("mae_loss: " + std::to_string(pred.rows) + "x" +
                         std::to_string(pred.cols) + " vs " + std::to_string(target.rows) +
                         "x" + std::to_string(target.cols));
    if (pred.size() == 0) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.data.size(); ++i)
        acc += std::abs(pred.data[i] - target.data[i]);
    return acc / static_cast<double>(pred.data.size());
}

Matrix mae_loss_grad(const Matrix& pred, const Matrix& target) {
    if (pred.rows != target.rows || pred.cols != target.cols)
        throw ShapeError("mae_loss_grad: shape mismatch");
    Matrix g(pred.rows, pred.cols);
    const double inv = pred.size() == 0 ? 0.0 : 1.0 / static_cast<double>(pred.data.size());
    for (std::size_t i = 0; i < pred.data.size(); ++i) {
        const double d = pred.data[i] - target.data[i];
        g.data[i] = d > 0.0 ? inv : (d < 0.0 ? -inv : 0.0);
    }
    return g;
}

ParamSet param_set(GruParams& p, const std::string& prefix) {
    return {
        {prefix + ".Wz", &p.Wz}, {prefix + ".Wr", &p.Wr}, {prefix + ".Wh", &p.Wh},
        {prefix + ".Uz", &p.Uz}, {prefix + ".Ur", &p.Ur}, {prefix + ".Uh", &p.Uh},
        {prefix + ".bz", &p.bz}, {prefix + ".br", &p.br}, {prefix + ".bh", &p.bh},
    };
}

ParamSet param_set(DenseParams& p, const std::string& prefix) {
    return {{prefix + ".weight", &p.weight}, {prefix + ".bias", &p.bias}};
}

void append(ParamSet& dst, ParamSet&& src) {
    for (auto& r : src) dst.push_back(std::move(r));
}

OptimizerState nadam_init(const ParamSet& params, double lr0, double decay) {
    OptimizerState st;
    st.lr0 = lr0;
    st.decay = decay;
    st.first_moment.reserve(params.size());
    st.second_moment.reserve(params.size());
    for (const auto& p : params) {
        st.first_moment.push_back(Matrix::zeros_like(*p.value));
        st.second_moment.push_back(Matrix::zeros_like(*p.value));
    }
    return st;
}

double nadam_lr(const OptimizerState& state) {
    return state.lr0 / (1.0 + state.decay * static_cast<double>(state.step));
}

void nadam_step(OptimizerState& state, const ParamSet& params,
                const std::vector<Matrix>& grads) {
    if (grads.size() != params.size() || state.first_moment.size() != params.size())
        throw ShapeError("nadam_step: parameter/gradient/state count mismatch");
    for (std::size_t b = 0; b < params.size(); ++b) {
        const Matrix& g = grads[b];
        const Matrix& v = *params[b].value;
        if (g.rows != v.rows || g.cols != v.cols)
            throw ShapeError("nadam_step: gradient shape mismatch at " + params[b].name);
        for (std::size_t i = 0; i < g.data.size(); ++i)
            if (!std::isfinite(g.data[i]))
                throw GradientError("non-finite gradient in block '" + params[b].name +
                                    "' at flat index " + std::to_string(i) +
                                    " (step " + std::to_string(state.step) + "); update rejected");
    }

    const double lr = nadam_lr(state);
    const double t = static_cast<double>(state.step + 1);
    const double b1 = state.beta1;
    const double b2 = state.beta2;
    const double m_corr = 1.0 - std::pow(b1, t + 1.0);
    const double g_corr = 1.0 - std::pow(b1, t);
    const double v_corr = 1.0 - std::pow(b2, t);

    for (std::size_t b = 0; b < params.size(); ++b) {
        Matrix& theta = *params[b].value;
        Matrix& m = state.first_moment[b];
        Matrix& v = state.second_moment[b];
        const Matrix& g = grads[b];
        for (std::size_t i = 0; i < theta.data.size(); ++i) {
            const double gi = g.data[i];
            m.data[i] = b1 * m.data[i] + (1.0 - b1) * gi;
            v.data[i] = b2 * v.data[i] + (1.0 - b2) * gi * gi;
            const double mbar = b1 * m.data[i] / m_corr + (1.0 - b1) * gi / g_corr;
            const double vhat = v.data[i] / v_corr;
            theta.data[i] -= lr * mbar / (std::sqrt(vhat) + state.epsilon);
        }
    }
    ++state.step;
}

std::vector<Matrix> finite_diff_grad(const std::function<double()>& f,
                                     const ParamSet& params, double h) {
    if (h <= 0.0) throw ArgumentError("finite_diff_grad: h must be > 0");
    std::vector<Matrix> out;
    out.reserve(params.size());
    for (const auto& p : params) {
        Matrix g = Matrix::zeros_like(*p.value);
        for (std::size_t i = 0; i < g.data.size(); ++i) {
            const double saved = p.value->data[i];
            p.value->data[i] = saved + h;
            const double up = f();
            p.value->data[i] = saved - h;
            const double down = f();
            p.value->data[i] = saved;
            g.data[i] = (up - down) / (2.0 * h);
        }
        out.push_back(std::move(g));
    }
    return out;
}

}  // namespace hs2s::nd
