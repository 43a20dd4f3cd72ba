#include "trader/env.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace trader {

double reward(Action action, Action prev_action, double d_next, double cost_c) {
    if (cost_c < 0.0) throw std::invalid_argument("cost must be >= 0");
    const int a = action_value(action);
    const int prev = action_value(prev_action);
    return a * d_next - cost_c * std::abs(a - prev);
}

EnvState reset_env(const EnvConfig& cfg) {
    EnvState s;
    s.t = cfg.horizon - 1;
    s.position = Action::Flat;
    return s;
}

bool env_done(const EnvState& env, const std::vector<double>& diffs) {
    return env.t + 1 >= diffs.size();
}

StepResult step(EnvState& env, const EnvConfig& cfg,
                const std::vector<double>& diffs, Action action) {
    if (env_done(env, diffs)) {
        throw std::logic_error("step on a finished environment");
    }
    StepResult res;
    res.reward = reward(action, env.position, diffs[env.t + 1], cfg.cost_c);
    env.position = action;
    env.t += 1;
    res.next_state = make_state(diffs, env.t, cfg.horizon, action);
    res.done = env_done(env, diffs);
    return res;
}

}  // namespace trader
