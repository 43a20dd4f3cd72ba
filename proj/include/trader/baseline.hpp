#pragma once

#include <cstdint>
#include <vector>

#include "trader/market.hpp"
#include "trader/netcore.hpp"

namespace trader {

// Four-way label: did the next-step move clear the transaction cost?
enum class MoveClass : int {
    UpBeyondCost = 0,
    UpWithinCost = 1,
    DownWithinCost = 2,
    DownBeyondCost = 3,
};

constexpr std::size_t kMoveClassCount = 4;

// d > c -> UpBeyond; 0 < d <= c -> UpWithin; -c <= d <= 0 -> DownWithin;
// d < -c -> DownBeyond. Ties go to the within (no-trade) classes.
MoveClass classify_move(double d, double cost_c);
std::vector<MoveClass> label_moves(const std::vector<double>& diffs,
                                   double cost_c);

struct BaselineConfig {
    std::size_t horizon = 32;
    double cost_c = 0.0;
    std::size_t lstm_hidden = 16;
    std::size_t fc_hidden = 16;
    std::size_t epochs = 5;
    std::size_t batch = 32;
    double lr = 0.01;
    double train_frac = 0.5;
    std::uint64_t seed = 0;
};

// NetworkParams with a 4-way softmax head instead of 3 Q outputs.
using ClassifierParams = NetworkParams;

std::vector<double> softmax_probs(const ClassifierParams& params,
                                  const MarketState& state);
MoveClass classify(const ClassifierParams& params, const MarketState& state);

struct TrainResult {
    ClassifierParams params;
    std::vector<double> epoch_losses;  // mean cross-entropy per epoch
};

// Cross-entropy training over (window, next-move label) pairs drawn
// from the series; deterministic per seed.
TrainResult train_classifier(const PriceSeries& series,
                             const BaselineConfig& cfg);

std::vector<Action> trade_from_classes(const std::vector<MoveClass>& preds);

struct BaselineRun {
    std::vector<Action> actions;  // aligned for segment_trades
    PriceSeries eval_prices;      // actions.size() + 1 points
    TrainResult train;
};

// Trains on the front split, runs the frozen classifier over the back
// split and maps predictions to the action stream.
BaselineRun run_baseline(const PriceSeries& series, const BaselineConfig& cfg);

}  // namespace trader
