#include "trader/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace trader {

MoveClass classify_move(double d, double cost_c) {
    if (cost_c < 0.0) throw std::invalid_argument("cost must be >= 0");
    if (d > cost_c) return MoveClass::UpBeyondCost;
    if (d > 0.0) return MoveClass::UpWithinCost;
    if (d >= -cost_c) return MoveClass::DownWithinCost;
    return MoveClass::DownBeyondCost;
}

std::vector<MoveClass> label_moves(const std::vector<double>& diffs,
                                   double cost_c) {
    std::vector<MoveClass> out;
    out.reserve(diffs.size());
    for (double d : diffs) out.push_back(classify_move(d, cost_c));
    return out;
}

std::vector<double> softmax_probs(const ClassifierParams& params,
                                  const MarketState& state) {
    if (params.dims.output_size != kMoveClassCount) {
        throw std::invalid_argument("classifier must have 4 outputs");
    }
    auto logits = forward_outputs(
        params, state.diffs, static_cast<double>(action_value(state.prev_action)));
    const double mx = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double& v : logits) {
        v = std::exp(v - mx);
        sum += v;
    }
    for (double& v : logits) v /= sum;
    return logits;
}

MoveClass classify(const ClassifierParams& params, const MarketState& state) {
    const auto probs = softmax_probs(params, state);
    const auto it = std::max_element(probs.begin(), probs.end());
    return static_cast<MoveClass>(it - probs.begin());
}

namespace {

struct Sample {
    MarketState state;
    int label;
};

std::vector<Sample> build_dataset(const std::vector<double>& diffs,
                                  const BaselineConfig& cfg) {
    std::vector<Sample> data;
    const std::size_t h = cfg.horizon;
    if (diffs.size() < h + 1) {
        throw std::invalid_argument("insufficient data for classifier training");
    }
    for (std::size_t t = h - 1; t + 1 < diffs.size(); ++t) {
        Sample s;
        s.state = make_state(diffs, t, h, Action::Flat);
        s.label = static_cast<int>(classify_move(diffs[t + 1], cfg.cost_c));
        data.push_back(std::move(s));
    }
    return data;
}

}  // namespace

TrainResult train_classifier(const PriceSeries& series,
                             const BaselineConfig& cfg) {
    if (series.size() < cfg.horizon + 2) {
        throw std::invalid_argument("series too short for classifier training");
    }
    const auto diffs = diff_series(series);
    auto data = build_dataset(diffs, cfg);

    NetDims dims;
    dims.input_size = cfg.horizon + 1;
    dims.lstm_hidden = cfg.lstm_hidden;
    dims.fc_hidden = cfg.fc_hidden;
    dims.output_size = kMoveClassCount;

    TrainResult res;
    res.params = init_params(dims, cfg.seed);
    std::mt19937_64 rng(cfg.seed ^ 0xa5a5a5a5a5a5a5a5ULL);

    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        std::size_t pos = 0;
        while (pos < order.size()) {
            const std::size_t bsz = std::min(cfg.batch, order.size() - pos);
            GradientSet acc = zero_gradients(dims);
            for (std::size_t i = 0; i < bsz; ++i) {
                const Sample& s = data[order[pos + i]];
                auto probs = softmax_probs(res.params, s.state);
                epoch_loss += -std::log(std::max(probs[s.label], 1e-300));
                // dL/dlogits = softmax - onehot
                probs[s.label] -= 1.0;
                backward_into(res.params, s.state.diffs, 0.0, probs, acc);
            }
            res.params = apply_gradients(res.params, acc, bsz, cfg.lr);
            pos += bsz;
        }
        res.epoch_losses.push_back(epoch_loss /
                                   static_cast<double>(data.size()));
    }
    return res;
}

std::vector<Action> trade_from_classes(const std::vector<MoveClass>& preds) {
    std::vector<Action> actions;
    actions.reserve(preds.size());
    for (MoveClass c : preds) {
        switch (c) {
            case MoveClass::UpBeyondCost: actions.push_back(Action::Long); break;
            case MoveClass::DownBeyondCost:
                actions.push_back(Action::Short);
                break;
            default: actions.push_back(Action::Flat); break;
        }
    }
    return actions;
}

BaselineRun run_baseline(const PriceSeries& series, const BaselineConfig& cfg) {
    if (!(cfg.train_frac > 0.0 && cfg.train_frac < 1.0)) {
        throw std::invalid_argument("train_frac must be in (0,1)");
    }
    const std::size_t n_train =
        static_cast<std::size_t>(static_cast<double>(series.size()) *
                                 cfg.train_frac);
    if (n_train < cfg.horizon + 2 || series.size() - n_train < cfg.horizon + 2) {
        throw std::invalid_argument("series too short for the requested split");
    }

    PriceSeries front, back;
    front.points.assign(series.points.begin(),
                        series.points.begin() + n_train);
    back.points.assign(series.points.begin() + n_train, series.points.end());

    BaselineRun run;
    run.train = train_classifier(front, cfg);

    const auto diffs = diff_series(back);
    const std::size_t h = cfg.horizon;
    std::vector<MoveClass> preds;
    for (std::size_t t = h - 1; t + 1 < diffs.size(); ++t) {
        preds.push_back(
            classify(run.train.params, make_state(diffs, t, h, Action::Flat)));
    }
    run.actions = trade_from_classes(preds);
    run.eval_prices.points.assign(back.points.begin() + h, back.points.end());
    return run;
}

}  // namespace trader
