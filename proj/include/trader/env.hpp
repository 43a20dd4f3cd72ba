#pragma once

#include <cstddef>
#include <vector>

#include "trader/market.hpp"

namespace trader {

struct EnvConfig {
    double cost_c = 0.0;  // price units charged per unit of position change
    std::size_t horizon = 32;
};

struct EnvState {
    std::size_t t = 0;          // index into the diff sequence
    Action position = Action::Flat;
};

struct StepResult {
    double reward = 0.0;
    MarketState next_state;
    bool done = false;
};

// action * d_next - cost_c * |action - prev_action|; no cost when the
// action matches the previous one.
double reward(Action action, Action prev_action, double d_next, double cost_c);

// Initial env positioned at the first decision index (t = H-1), flat.
EnvState reset_env(const EnvConfig& cfg);

// Executes `action` at env.t: reward uses diffs[t+1], position and t
// advance, next_state embeds the executed action. Throws when stepping
// a done environment.
StepResult step(EnvState& env, const EnvConfig& cfg,
                const std::vector<double>& diffs, Action action);

bool env_done(const EnvState& env, const std::vector<double>& diffs);

}  // namespace trader
