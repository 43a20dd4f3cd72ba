#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "trader/market.hpp"

namespace trader {

struct NetDims {
    std::size_t input_size = 33;  // H + 1
    std::size_t lstm_hidden = 32;
    std::size_t fc_hidden = 16;
    std::size_t output_size = 3;

    std::size_t horizon() const { return input_size - 1; }
    void validate() const;
};

struct Matrix {
    std::size_t rows = 0, cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}
    double& operator()(std::size_t r, std::size_t c) { return a[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const {
        return a[r * cols + c];
    }
};

// gate order within the arrays: input, forget, cell candidate, output
enum Gate { kGateInput = 0, kGateForget = 1, kGateCell = 2, kGateOutput = 3 };

// All weights of one Q network: LSTM gate weights/biases plus the two
// dense sublayers. The per-step LSTM input is a single scalar diff, so
// the input weights are vectors of length lstm_hidden.
struct NetworkParams {
    NetDims dims;
    std::array<std::vector<double>, 4> wx;  // lstm_hidden each
    std::array<Matrix, 4> wh;               // lstm_hidden x lstm_hidden
    std::array<std::vector<double>, 4> b;   // lstm_hidden each
    Matrix fc1_w;                           // fc_hidden x (lstm_hidden + 1)
    std::vector<double> fc1_b;
    Matrix fc2_w;                           // output_size x fc_hidden
    std::vector<double> fc2_b;

    std::size_t parameter_count() const;
    bool shape_congruent(const NetworkParams& other) const;
    bool all_finite() const;

    // visit every parameter array as a flat span (same order for
    // shape-congruent values)
    template <typename F>
    void for_each_array(F&& f) {
        for (int g = 0; g < 4; ++g) {
            f(wx[g]);
            f(wh[g].a);
            f(b[g]);
        }
        f(fc1_w.a);
        f(fc1_b);
        f(fc2_w.a);
        f(fc2_b);
    }
    template <typename F>
    void for_each_array(F&& f) const {
        for (int g = 0; g < 4; ++g) {
            f(wx[g]);
            f(wh[g].a);
            f(b[g]);
        }
        f(fc1_w.a);
        f(fc1_b);
        f(fc2_w.a);
        f(fc2_b);
    }
};

// One real array per parameter array, same shapes.
using GradientSet = NetworkParams;

struct QValues {
    double q_short = 0.0;
    double q_flat = 0.0;
    double q_long = 0.0;

    double operator[](Action a) const {
        switch (a) {
            case Action::Short: return q_short;
            case Action::Flat: return q_flat;
            default: return q_long;
        }
    }
};

// Zero-mean uniform init scaled by fan-in; forget-gate bias set to 1.
// Deterministic for a fixed seed.
NetworkParams init_params(const NetDims& dims, std::uint64_t seed);

GradientSet zero_gradients(const NetDims& dims);

// Raw multi-output forward: consumes the diffs one scalar per LSTM step,
// concatenates the final hidden state with prev_scalar and runs the
// dense head (tanh sublayer, then linear). Works for any output_size.
std::vector<double> forward_outputs(const NetworkParams& params,
                                    const std::vector<double>& diffs,
                                    double prev_scalar);

// Q-network forward; requires output_size == 3.
QValues forward(const NetworkParams& params, const MarketState& state);

// Backprop an arbitrary gradient w.r.t. the outputs through the head and
// the LSTM unroll, accumulating into `acc`. Returns the outputs.
std::vector<double> backward_into(const NetworkParams& params,
                                  const std::vector<double>& diffs,
                                  double prev_scalar,
                                  const std::vector<double>& output_grad,
                                  GradientSet& acc);

// loss = (forward(params,state)[action] - target)^2, exact analytic
// gradients via backpropagation through time. Target is a constant.
double loss_and_gradient_into(const NetworkParams& params,
                              const MarketState& state, Action action,
                              double target, GradientSet& acc);

struct LossGrad {
    double loss = 0.0;
    GradientSet grads;
};

LossGrad loss_and_gradient(const NetworkParams& params,
                           const MarketState& state, Action action,
                           double target);

// params' = params - lr * (grads / batch); plain SGD.
NetworkParams apply_gradients(const NetworkParams& params,
                              const GradientSet& grads, std::size_t batch,
                              double lr);

NetworkParams copy_params(const NetworkParams& src);

// Versioned JSON checkpoint.
void save_checkpoint(const NetworkParams& params, const std::string& path);
NetworkParams load_checkpoint(const std::string& path);

struct GradCheckResult {
    double max_rel_error = 0.0;
    std::string worst_coordinate;
};

// Central finite differences over every parameter entry. If
// corrupt_index >= 0, the analytic gradient entry at that flat index is
// perturbed first (negative-control hook for tests).
GradCheckResult grad_check(const NetworkParams& params,
                           const MarketState& state, Action action,
                           double target, double step = 1e-5,
                           long corrupt_index = -1);

}  // namespace trader
