#include "trader/netcore.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include <json.hpp>

namespace trader {

void NetDims::validate() const {
    if (input_size < 2 || lstm_hidden < 1 || fc_hidden < 1 || output_size < 1) {
        throw std::invalid_argument("invalid network dimensions");
    }
}

std::size_t NetworkParams::parameter_count() const {
    std::size_t n = 0;
    for_each_array([&](const std::vector<double>& v) { n += v.size(); });
    return n;
}

bool NetworkParams::shape_congruent(const NetworkParams& other) const {
    bool ok = dims.lstm_hidden == other.dims.lstm_hidden &&
              dims.fc_hidden == other.dims.fc_hidden &&
              dims.output_size == other.dims.output_size;
    for (int g = 0; g < 4 && ok; ++g) {
        ok = wx[g].size() == other.wx[g].size() &&
             wh[g].rows == other.wh[g].rows && wh[g].cols == other.wh[g].cols &&
             b[g].size() == other.b[g].size();
    }
    return ok && fc1_w.rows == other.fc1_w.rows &&
           fc1_w.cols == other.fc1_w.cols &&
           fc2_w.rows == other.fc2_w.rows && fc2_w.cols == other.fc2_w.cols;
}

bool NetworkParams::all_finite() const {
    bool ok = true;
    for_each_array([&](const std::vector<double>& v) {
        for (double x : v) {
            if (!std::isfinite(x)) ok = false;
        }
    });
    return ok;
}

namespace {

NetworkParams make_shaped(const NetDims& dims) {
    NetworkParams p;
    p.dims = dims;
    const std::size_t m = dims.lstm_hidden;
    for (int g = 0; g < 4; ++g) {
        p.wx[g].assign(m, 0.0);
        p.wh[g] = Matrix(m, m);
        p.b[g].assign(m, 0.0);
    }
    p.fc1_w = Matrix(dims.fc_hidden, m + 1);
    p.fc1_b.assign(dims.fc_hidden, 0.0);
    p.fc2_w = Matrix(dims.output_size, dims.fc_hidden);
    p.fc2_b.assign(dims.output_size, 0.0);
    return p;
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

NetworkParams init_params(const NetDims& dims, std::uint64_t seed) {
    dims.validate();
    NetworkParams p = make_shaped(dims);
    std::mt19937_64 rng(seed);
    auto fill = [&](std::vector<double>& v, std::size_t fan_in) {
        double s = 1.0 / std::sqrt(static_cast<double>(fan_in));
        std::uniform_real_distribution<double> dist(-s, s);
        for (double& x : v) x = dist(rng);
    };
    // LSTM fan-in: scalar input + recurrent hidden
    const std::size_t lstm_fan = 1 + dims.lstm_hidden;
    for (int g = 0; g < 4; ++g) {
        fill(p.wx[g], lstm_fan);
        fill(p.wh[g].a, lstm_fan);
        // biases start at zero; forget gate at 1
    }
    p.b[kGateForget].assign(dims.lstm_hidden, 1.0);
    fill(p.fc1_w.a, dims.lstm_hidden + 1);
    fill(p.fc2_w.a, dims.fc_hidden);
    return p;
}

GradientSet zero_gradients(const NetDims& dims) { return make_shaped(dims); }

namespace {

// caches for one unrolled forward pass
struct ForwardCache {
    std::size_t steps = 0;
    // per step: gate activations, cell, tanh(cell), hidden
    std::vector<std::array<std::vector<double>, 4>> gates;
    std::vector<std::vector<double>> c, tanh_c, h;
    std::vector<double> z;   // [h_T, prev_scalar]
    std::vector<double> a1;  // tanh sublayer output
    std::vector<double> out;
};

void run_forward(const NetworkParams& p, const std::vector<double>& diffs,
                 double prev_scalar, ForwardCache* cache,
                 std::vector<double>& out) {
    const std::size_t m = p.dims.lstm_hidden;
    const std::size_t steps = diffs.size();

    std::vector<double> h(m, 0.0), c(m, 0.0);
    std::array<std::vector<double>, 4> pre;
    for (auto& v : pre) v.assign(m, 0.0);

    if (cache) {
        cache->steps = steps;
        cache->gates.resize(steps);
        cache->c.resize(steps);
        cache->tanh_c.resize(steps);
        cache->h.resize(steps);
    }

    for (std::size_t t = 0; t < steps; ++t) {
        const double x = diffs[t];
        for (int g = 0; g < 4; ++g) {
            const Matrix& W = p.wh[g];
            for (std::size_t j = 0; j < m; ++j) {
                double acc = p.wx[g][j] * x + p.b[g][j];
                const double* row = &W.a[j * m];
                for (std::size_t k = 0; k < m; ++k) acc += row[k] * h[k];
                pre[g][j] = acc;
            }
        }
        std::array<std::vector<double>, 4> act;
        for (auto& v : act) v.resize(m);
        for (std::size_t j = 0; j < m; ++j) {
            act[kGateInput][j] = sigmoid(pre[kGateInput][j]);
            act[kGateForget][j] = sigmoid(pre[kGateForget][j]);
            act[kGateCell][j] = std::tanh(pre[kGateCell][j]);
            act[kGateOutput][j] = sigmoid(pre[kGateOutput][j]);
        }
        std::vector<double> c_new(m), tanh_c(m), h_new(m);
        for (std::size_t j = 0; j < m; ++j) {
            c_new[j] = act[kGateForget][j] * c[j] +
                       act[kGateInput][j] * act[kGateCell][j];
            tanh_c[j] = std::tanh(c_new[j]);
            h_new[j] = act[kGateOutput][j] * tanh_c[j];
        }
        if (cache) {
            cache->gates[t] = act;
            cache->c[t] = c_new;
            cache->tanh_c[t] = tanh_c;
            cache->h[t] = h_new;
        }
        c.swap(c_new);
        h.swap(h_new);
    }

    std::vector<double> z(m + 1);
    for (std::size_t j = 0; j < m; ++j) z[j] = h[j];
    z[m] = prev_scalar;

    std::vector<double> a1(p.dims.fc_hidden);
    for (std::size_t j = 0; j < p.dims.fc_hidden; ++j) {
        double acc = p.fc1_b[j];
        const double* row = &p.fc1_w.a[j * (m + 1)];
        for (std::size_t k = 0; k <= m; ++k) acc += row[k] * z[k];
        a1[j] = std::tanh(acc);
    }
    out.assign(p.dims.output_size, 0.0);
    for (std::size_t j = 0; j < p.dims.output_size; ++j) {
        double acc = p.fc2_b[j];
        const double* row = &p.fc2_w.a[j * p.dims.fc_hidden];
        for (std::size_t k = 0; k < p.dims.fc_hidden; ++k) acc += row[k] * a1[k];
        out[j] = acc;
    }
    if (cache) {
        cache->z = std::move(z);
        cache->a1 = std::move(a1);
        cache->out = out;
    }
}

void check_input(const NetworkParams& p, const std::vector<double>& diffs) {
    if (diffs.size() + 1 != p.dims.input_size) {
        throw std::invalid_argument(
            "state dimension mismatch: network expects " +
            std::to_string(p.dims.input_size - 1) + " diffs, got " +
            std::to_string(diffs.size()));
    }
}

}  // namespace

std::vector<double> forward_outputs(const NetworkParams& params,
                                    const std::vector<double>& diffs,
                                    double prev_scalar) {
    check_input(params, diffs);
    std::vector<double> out;
    run_forward(params, diffs, prev_scalar, nullptr, out);
    return out;
}

QValues forward(const NetworkParams& params, const MarketState& state) {
    if (params.dims.output_size != 3) {
        throw std::invalid_argument("Q network must have 3 outputs");
    }
    auto out = forward_outputs(params, state.diffs,
                               static_cast<double>(action_value(state.prev_action)));
    return QValues{out[0], out[1], out[2]};
}

std::vector<double> backward_into(const NetworkParams& p,
                                  const std::vector<double>& diffs,
                                  double prev_scalar,
                                  const std::vector<double>& output_grad,
                                  GradientSet& acc) {
    check_input(p, diffs);
    if (output_grad.size() != p.dims.output_size) {
        throw std::invalid_argument("output gradient size mismatch");
    }
    if (!p.shape_congruent(acc)) {
        throw std::invalid_argument("gradient accumulator shape mismatch");
    }

    const std::size_t m = p.dims.lstm_hidden;
    const std::size_t steps = diffs.size();

    ForwardCache cache;
    std::vector<double> out;
    run_forward(p, diffs, prev_scalar, &cache, out);

    // dense head
    std::vector<double> da1(p.dims.fc_hidden, 0.0);
    for (std::size_t j = 0; j < p.dims.output_size; ++j) {
        const double d = output_grad[j];
        if (d == 0.0) continue;
        double* wrow = &acc.fc2_w.a[j * p.dims.fc_hidden];
        const double* prow = &p.fc2_w.a[j * p.dims.fc_hidden];
        for (std::size_t k = 0; k < p.dims.fc_hidden; ++k) {
            wrow[k] += d * cache.a1[k];
            da1[k] += prow[k] * d;
        }
        acc.fc2_b[j] += d;
    }
    std::vector<double> dz(m + 1, 0.0);
    for (std::size_t j = 0; j < p.dims.fc_hidden; ++j) {
        const double du = da1[j] * (1.0 - cache.a1[j] * cache.a1[j]);
        if (du == 0.0) continue;
        double* wrow = &acc.fc1_w.a[j * (m + 1)];
        const double* prow = &p.fc1_w.a[j * (m + 1)];
        for (std::size_t k = 0; k <= m; ++k) {
            wrow[k] += du * cache.z[k];
            dz[k] += prow[k] * du;
        }
        acc.fc1_b[j] += du;
    }

    // backprop through time
    std::vector<double> dh(dz.begin(), dz.begin() + m);
    std::vector<double> dc(m, 0.0);
    std::array<std::vector<double>, 4> dpre;
    for (auto& v : dpre) v.assign(m, 0.0);

    for (std::size_t ti = steps; ti-- > 0;) {
        const auto& act = cache.gates[ti];
        const auto& tanh_c = cache.tanh_c[ti];
        const std::vector<double>* c_prev = ti > 0 ? &cache.c[ti - 1] : nullptr;
        const std::vector<double>* h_prev = ti > 0 ? &cache.h[ti - 1] : nullptr;

        for (std::size_t j = 0; j < m; ++j) {
            const double o = act[kGateOutput][j];
            const double i = act[kGateInput][j];
            const double f = act[kGateForget][j];
            const double g = act[kGateCell][j];
            const double tc = tanh_c[j];

            const double do_ = dh[j] * tc;
            const double dcj = dc[j] + dh[j] * o * (1.0 - tc * tc);
            const double di = dcj * g;
            const double dg = dcj * i;
            const double cp = c_prev ? (*c_prev)[j] : 0.0;
            const double df = dcj * cp;

            dpre[kGateInput][j] = di * i * (1.0 - i);
            dpre[kGateForget][j] = df * f * (1.0 - f);
            dpre[kGateCell][j] = dg * (1.0 - g * g);
            dpre[kGateOutput][j] = do_ * o * (1.0 - o);
            dc[j] = dcj * f;
        }

        const double x = diffs[ti];
        std::fill(dh.begin(), dh.end(), 0.0);
        for (int g = 0; g < 4; ++g) {
            const Matrix& W = p.wh[g];
            Matrix& dW = acc.wh[g];
            for (std::size_t j = 0; j < m; ++j) {
                const double d = dpre[g][j];
                if (d == 0.0) continue;
                acc.wx[g][j] += d * x;
                acc.b[g][j] += d;
                if (h_prev) {
                    double* dwrow = &dW.a[j * m];
                    const double* hp = h_prev->data();
                    for (std::size_t k = 0; k < m; ++k) dwrow[k] += d * hp[k];
                }
                const double* wrow = &W.a[j * m];
                for (std::size_t k = 0; k < m; ++k) dh[k] += wrow[k] * d;
            }
        }
        // dh now holds the gradient w.r.t. h_{t-1}; dc w.r.t. c_{t-1}
    }
    return out;
}

double loss_and_gradient_into(const NetworkParams& params,
                              const MarketState& state, Action action,
                              double target, GradientSet& acc) {
    if (!std::isfinite(target)) {
        throw std::invalid_argument("non-finite TD target");
    }
    if (params.dims.output_size != 3) {
        throw std::invalid_argument("Q network must have 3 outputs");
    }
    const double prev =
        static_cast<double>(action_value(state.prev_action));

    // one forward to get the error, then one backward with the seeded
    // output gradient (run_forward is cheap relative to BPTT)
    auto out = forward_outputs(params, state.diffs, prev);
    const double err = out[action_index(action)] - target;

    std::vector<double> output_grad(params.dims.output_size, 0.0);
    output_grad[action_index(action)] = 2.0 * err;
    backward_into(params, state.diffs, prev, output_grad, acc);
    return err * err;
}

LossGrad loss_and_gradient(const NetworkParams& params,
                           const MarketState& state, Action action,
                           double target) {
    LossGrad lg;
    lg.grads = zero_gradients(params.dims);
    lg.loss = loss_and_gradient_into(params, state, action, target, lg.grads);
    return lg;
}

NetworkParams apply_gradients(const NetworkParams& params,
                              const GradientSet& grads, std::size_t batch,
                              double lr) {
    if (!(lr > 0.0)) throw std::invalid_argument("learning rate must be > 0");
    if (batch < 1) throw std::invalid_argument("batch must be >= 1");
    if (!params.shape_congruent(grads)) {
        throw std::invalid_argument("gradient shape mismatch");
    }
    NetworkParams next = params;
    const double scale = lr / static_cast<double>(batch);
    auto arrays_p = [&] {
        std::vector<const std::vector<double>*> v;
        grads.for_each_array([&](const std::vector<double>& a) { v.push_back(&a); });
        return v;
    }();
    std::size_t idx = 0;
    next.for_each_array([&](std::vector<double>& a) {
        const std::vector<double>& g = *arrays_p[idx++];
        for (std::size_t i = 0; i < a.size(); ++i) a[i] -= scale * g[i];
    });
    return next;
}

NetworkParams copy_params(const NetworkParams& src) { return src; }

// -------------------------------------------------------------------------
// checkpoint serialization

namespace {
constexpr const char* kCheckpointSchema = "qnet-checkpoint";
constexpr int kCheckpointVersion = 1;
}  // namespace

void save_checkpoint(const NetworkParams& params, const std::string& path) {
    nlohmann::json j;
    j["schema"] = kCheckpointSchema;
    j["version"] = kCheckpointVersion;
    j["dims"] = {{"input_size", params.dims.input_size},
                 {"lstm_hidden", params.dims.lstm_hidden},
                 {"fc_hidden", params.dims.fc_hidden},
                 {"output_size", params.dims.output_size}};
    static const char* gate_names[4] = {"input", "forget", "cell", "output"};
    nlohmann::json lstm;
    for (int g = 0; g < 4; ++g) {
        lstm[gate_names[g]] = {{"wx", params.wx[g]},
                               {"wh", params.wh[g].a},
                               {"b", params.b[g]}};
    }
    j["lstm"] = lstm;
    j["fc1"] = {{"w", params.fc1_w.a}, {"b", params.fc1_b}};
    j["fc2"] = {{"w", params.fc2_w.a}, {"b", params.fc2_b}};

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    out << j.dump(2) << '\n';
}

NetworkParams load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    nlohmann::json j;
    in >> j;
    if (j.value("schema", "") != kCheckpointSchema ||
        j.value("version", 0) != kCheckpointVersion) {
        throw std::runtime_error("unrecognized checkpoint schema in " + path);
    }
    NetDims dims;
    dims.input_size = j["dims"]["input_size"].get<std::size_t>();
    dims.lstm_hidden = j["dims"]["lstm_hidden"].get<std::size_t>();
    dims.fc_hidden = j["dims"]["fc_hidden"].get<std::size_t>();
    dims.output_size = j["dims"]["output_size"].get<std::size_t>();
    dims.validate();

    NetworkParams p = make_shaped(dims);
    static const char* gate_names[4] = {"input", "forget", "cell", "output"};
    for (int g = 0; g < 4; ++g) {
        const auto& gj = j["lstm"][gate_names[g]];
        p.wx[g] = gj["wx"].get<std::vector<double>>();
        p.wh[g].a = gj["wh"].get<std::vector<double>>();
        p.b[g] = gj["b"].get<std::vector<double>>();
        if (p.wx[g].size() != dims.lstm_hidden ||
            p.wh[g].a.size() != dims.lstm_hidden * dims.lstm_hidden ||
            p.b[g].size() != dims.lstm_hidden) {
            throw std::runtime_error("checkpoint LSTM shape mismatch");
        }
    }
    p.fc1_w.a = j["fc1"]["w"].get<std::vector<double>>();
    p.fc1_b = j["fc1"]["b"].get<std::vector<double>>();
    p.fc2_w.a = j["fc2"]["w"].get<std::vector<double>>();
    p.fc2_b = j["fc2"]["b"].get<std::vector<double>>();
    if (p.fc1_w.a.size() != dims.fc_hidden * (dims.lstm_hidden + 1) ||
        p.fc1_b.size() != dims.fc_hidden ||
        p.fc2_w.a.size() != dims.output_size * dims.fc_hidden ||
        p.fc2_b.size() != dims.output_size) {
        throw std::runtime_error("checkpoint head shape mismatch");
    }
    if (!p.all_finite()) throw std::runtime_error("checkpoint has non-finite values");
    return p;
}

// -------------------------------------------------------------------------
// finite-difference verification

GradCheckResult grad_check(const NetworkParams& params,
                           const MarketState& state, Action action,
                           double target, double step, long corrupt_index) {
    LossGrad lg = loss_and_gradient(params, state, action, target);

    std::vector<std::vector<double>*> grad_arrays;
    lg.grads.for_each_array(
        [&](std::vector<double>& a) { grad_arrays.push_back(&a); });
    if (corrupt_index >= 0) {
        long idx = corrupt_index;
        for (auto* a : grad_arrays) {
            if (idx < static_cast<long>(a->size())) {
                (*a)[idx] += 1.0;
                break;
            }
            idx -= static_cast<long>(a->size());
        }
    }

    static const char* array_names[] = {
        "wx.input", "wh.input", "b.input", "wx.forget", "wh.forget", "b.forget",
        "wx.cell",  "wh.cell",  "b.cell",  "wx.output", "wh.output", "b.output",
        "fc1.w",    "fc1.b",    "fc2.w",   "fc2.b"};

    NetworkParams work = params;
    std::vector<std::vector<double>*> work_arrays;
    work.for_each_array(
        [&](std::vector<double>& a) { work_arrays.push_back(&a); });

    auto eval_loss = [&]() {
        const double q = forward(work, state)[action];
        const double err = q - target;
        return err * err;
    };

    GradCheckResult res;
    for (std::size_t ai = 0; ai < work_arrays.size(); ++ai) {
        std::vector<double>& arr = *work_arrays[ai];
        const std::vector<double>& g = *grad_arrays[ai];
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const double orig = arr[i];
            arr[i] = orig + step;
            const double lp = eval_loss();
            arr[i] = orig - step;
            const double lm = eval_loss();
            arr[i] = orig;
            const double fd = (lp - lm) / (2.0 * step);
            const double denom =
                std::max({std::abs(fd), std::abs(g[i]), 1e-3});
            const double rel = std::abs(fd - g[i]) / denom;
            if (rel > res.max_rel_error) {
                res.max_rel_error = rel;
                res.worst_coordinate =
                    std::string(array_names[ai]) + "[" + std::to_string(i) + "]";
            }
        }
    }
    return res;
}

}  // namespace trader
