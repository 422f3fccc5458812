#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hs2s/errors.hpp"

namespace hs2s::nd {

using Vec = std::vector<double>;

// Dense row-major matrix. Doubles everywhere: training math is 64-bit,
// checkpoints downcast to 32-bit on serialization.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c, double fill = 0.0)
        : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, fill) {}

    double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
    double* row(int r) { return data.data() + static_cast<std::size_t>(r) * cols; }
    const double* row(int r) const { return data.data() + static_cast<std::size_t>(r) * cols; }
    std::size_t size() const { return data.size(); }

    static Matrix zeros_like(const Matrix& m) { return Matrix(m.rows, m.cols); }
};

bool all_finite(const Matrix& m);

enum class Activation { kTanh, kLinear };

// y = act(W x + b). bias is stored (out x 1).
struct DenseParams {
    Matrix weight;
    Matrix bias;
    Activation act = Activation::kTanh;
};

struct DenseCache {
    Vec x;
    Vec y;  // post-activation
};

Vec dense_forward(const DenseParams& p, const Vec& x);
Vec dense_forward(const DenseParams& p, const Vec& x, DenseCache& cache);
// Accumulates into grad; when dx != nullptr writes the input gradient.
void dense_backward(const DenseParams& p, const DenseCache& cache, const Vec& dy,
                    DenseParams& grad, Vec* dx);

// Gated recurrent unit:
//   z = sigmoid(Wz x + Uz h + bz)
//   r = sigmoid(Wr x + Ur h + br)
//   hc = cand(Wh x + Uh (r*h) + bh)
//   h' = (1-z)*h + z*hc
// The candidate activation defaults to tanh; the model layer switches it to
// linear when the data is z-score normalized.
struct GruParams {
    int input_dim = 0;
    int hidden_dim = 0;
    Matrix Wz, Wr, Wh;  // hidden x input
    Matrix Uz, Ur, Uh;  // hidden x hidden
    Matrix bz, br, bh;  // hidden x 1

    static GruParams zeros(int input_dim, int hidden_dim);
};

struct GruStepCache {
    Vec x, h_prev, z, r, hc, h_new;
};

Vec gru_step(const GruParams& p, const Vec& x, const Vec& h,
             Activation cand = Activation::kTanh);
const Vec& gru_step(const GruParams& p, const Vec& x, const Vec& h, Activation cand,
                    GruStepCache& cache);
// dh_new is the loss gradient at h'. Parameter gradients accumulate into
// grad; dh_prev is overwritten; dx (optional) is overwritten.
void gru_step_backward(const GruParams& p, const GruStepCache& cache, Activation cand,
                       const Vec& dh_new, GruParams& grad, Vec* dx, Vec& dh_prev);

// Mean absolute error over all entries; subgradient 0 at ties.
double mae_loss(const Matrix& pred, const Matrix& target);
Matrix mae_loss_grad(const Matrix& pred, const Matrix& target);

// Flat named view over a set of parameter matrices. Naming/order is stable
// and shared by the optimizer, the checkpoint writer and finite differences.
struct ParamRef {
    std::string name;
    Matrix* value = nullptr;
};
using ParamSet = std::vector<ParamRef>;

ParamSet param_set(GruParams& p, const std::string& prefix);
ParamSet param_set(DenseParams& p, const std::string& prefix);
void append(ParamSet& dst, ParamSet&& src);

// Nadam (Nesterov-momentum Adam), constant beta1:
//   m_t = b1 m + (1-b1) g           v_t = b2 v + (1-b2) g^2
//   mbar = b1 m_t/(1-b1^(t+1)) + (1-b1) g/(1-b1^t)
//   theta -= lr_t * mbar / (sqrt(v_t/(1-b2^t)) + eps)
// with inverse-time decay lr_t = lr0 / (1 + decay*k), k = 0-based update index.
struct OptimizerState {
    long step = 0;  // completed updates
    double lr0 = 8e-4;
    double decay = 4e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::vector<Matrix> first_moment;
    std::vector<Matrix> second_moment;
};

OptimizerState nadam_init(const ParamSet& params, double lr0, double decay);
// Effective learning rate of the *next* update.
double nadam_lr(const OptimizerState& state);
// Applies one update in place. Throws GradientError on any non-finite
// gradient entry, leaving params and state untouched.
void nadam_step(OptimizerState& state, const ParamSet& params,
                const std::vector<Matrix>& grads);

// Central differences (f(t+h)-f(t-h))/2h per coordinate of every block.
// f is evaluated with the parameters perturbed in place.
std::vector<Matrix> finite_diff_grad(const std::function<double()>& f,
                                     const ParamSet& params, double h);

}  // namespace hs2s::nd
