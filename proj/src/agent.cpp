#include "trader/agent.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <unordered_set>

namespace trader {

void AgentConfig::validate() const {
    if (!(gamma >= 0.0 && gamma < 1.0)) {
        throw std::invalid_argument("gamma must be in [0,1)");
    }
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
        throw std::invalid_argument("epsilon must be in [0,1]");
    }
    if (batch < 1) throw std::invalid_argument("batch must be >= 1");
    if (batch > buffer_cap) {
        throw std::invalid_argument("batch size exceeds buffer capacity");
    }
    if (!(lr > 0.0)) throw std::invalid_argument("learning rate must be > 0");
    if (copy_check_every < 1) {
        throw std::invalid_argument("copy_check_every must be >= 1");
    }
    if (dims.input_size != horizon + 1) {
        throw std::invalid_argument("dims.input_size must equal H + 1");
    }
    dims.validate();
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity < 1) throw std::invalid_argument("buffer capacity must be >= 1");
}

void ReplayBuffer::push(Transition t) {
    if (t.s_next.prev_action != t.a) {
        throw std::invalid_argument(
            "transition inconsistency: s_next must embed the action taken");
    }
    if (slots_.size() == capacity_) slots_.pop_front();
    slots_.push_back(std::move(t));
}

DualAgent make_agent(const AgentConfig& cfg) {
    cfg.validate();
    DualAgent agent;
    agent.cfg = cfg;
    agent.theta = init_params(cfg.dims, cfg.seed);
    // zero output head: initial Q is identically 0, so the greedy trader
    // starts flat and the copy-when-flat gate can fire from step one
    // (a never-flat random trader would never synchronize with theta)
    std::fill(agent.theta.fc2_w.a.begin(), agent.theta.fc2_w.a.end(), 0.0);
    std::fill(agent.theta.fc2_b.begin(), agent.theta.fc2_b.end(), 0.0);
    agent.phi = copy_params(agent.theta);
    agent.rng.seed(cfg.seed + 0x9e3779b97f4a7c15ULL);
    return agent;
}

Action select_greedy(const NetworkParams& params, const MarketState& s) {
    const QValues q = forward(params, s);
    if (!std::isfinite(q.q_short) || !std::isfinite(q.q_flat) ||
        !std::isfinite(q.q_long)) {
        throw std::runtime_error("non-finite Q values in action selection");
    }
    // tie-break order: flat, long, short
    Action best = Action::Flat;
    double best_q = q.q_flat;
    if (q.q_long > best_q) {
        best = Action::Long;
        best_q = q.q_long;
    }
    if (q.q_short > best_q) best = Action::Short;
    return best;
}

Action select_epsilon_greedy(const NetworkParams& params, const MarketState& s,
                             double epsilon, std::mt19937_64& rng) {
    if (epsilon < 0.0 || epsilon > 1.0) {
        throw std::invalid_argument("epsilon must be in [0,1]");
    }
    if (epsilon > 0.0 &&
        std::uniform_real_distribution<double>(0.0, 1.0)(rng) < epsilon) {
        return action_from_index(std::uniform_int_distribution<int>(0, 2)(rng));
    }
    return select_greedy(params, s);
}

double td_target(double r, double gamma, double q_next_same_action) {
    if (!std::isfinite(r) || !std::isfinite(q_next_same_action)) {
        throw std::invalid_argument("non-finite td_target inputs");
    }
    return r + gamma * q_next_same_action;
}

namespace {

// Floyd's algorithm: k distinct indices from [0, n)
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k,
                                        std::mt19937_64& rng) {
    std::unordered_set<std::size_t> chosen;
    std::vector<std::size_t> out;
    out.reserve(k);
    for (std::size_t j = n - k; j < n; ++j) {
        std::size_t r =
            std::uniform_int_distribution<std::size_t>(0, j)(rng);
        if (chosen.count(r)) r = j;
        chosen.insert(r);
        out.push_back(r);
    }
    return out;
}

}  // namespace

std::optional<double> train_step(DualAgent& agent, const ReplayBuffer& buffer,
                                 const TrainObserver* obs) {
    const std::size_t n = agent.cfg.batch;
    if (buffer.size() < n) return std::nullopt;

    auto indices = sample_indices(buffer.size(), n, agent.rng);
    GradientSet acc = zero_gradients(agent.cfg.dims);
    double total_loss = 0.0;
    for (std::size_t idx : indices) {
        const Transition& tr = buffer.at(idx);
        const double q_next = forward(agent.theta, tr.s_next)[tr.a];
        if (obs && obs->on_sample) obs->on_sample(tr, q_next);
        const double y = td_target(tr.r, agent.cfg.gamma, q_next);
        total_loss += loss_and_gradient_into(agent.theta, tr.s, tr.a, y, acc);
    }
    agent.theta = apply_gradients(agent.theta, acc, n, agent.cfg.lr);
    return total_loss / static_cast<double>(n);
}

bool maybe_copy(DualAgent& agent, Action last_trade_action) {
    if (last_trade_action != Action::Flat) return false;
    agent.phi = copy_params(agent.theta);
    return true;
}

double RunTrace::cumulative_trade_reward() const {
    double sum = 0.0;
    for (double r : trade_rewards) sum += r;
    return sum;
}

RunTrace run_online(DualAgent& agent, const PriceSeries& series,
                    const EnvConfig& env_cfg, const StepObserver& observer) {
    agent.cfg.validate();
    const std::size_t h = agent.cfg.horizon;
    if (env_cfg.horizon != h) {
        throw std::invalid_argument("env and agent horizons differ");
    }
    if (series.size() < h + 2) {
        throw std::invalid_argument("series too short for one state (needs H+2 points)");
    }

    const std::vector<double> diffs = diff_series(series);
    ReplayBuffer buffer(agent.cfg.buffer_cap);

    RunTrace trace;
    const std::size_t n_steps = diffs.size() - h;
    trace.trade_actions.reserve(n_steps);
    trace.learner_actions.reserve(n_steps);
    trace.learner_rewards.reserve(n_steps);
    trace.trade_rewards.reserve(n_steps);
    trace.losses.reserve(n_steps);
    trace.copied.reserve(n_steps);

    Action trade_prev = Action::Flat;
    Action learner_prev = Action::Flat;

    std::size_t step_no = 0;
    for (std::size_t t = h - 1; t + 1 < diffs.size(); ++t, ++step_no) {
        const MarketState s_trade = make_state(diffs, t, h, trade_prev);
        const Action a_trade = step_no < agent.cfg.trade_warmup
                                   ? Action::Flat
                                   : select_greedy(agent.phi, s_trade);

        const MarketState s_learn = make_state(diffs, t, h, learner_prev);
        const Action a_learn = select_epsilon_greedy(
            agent.theta, s_learn, agent.cfg.epsilon, agent.rng);

        const double r_learn =
            reward(a_learn, learner_prev, diffs[t + 1], env_cfg.cost_c);
        const double r_trade =
            reward(a_trade, trade_prev, diffs[t + 1], env_cfg.cost_c);

        Transition tr;
        tr.s = s_learn;
        tr.a = a_learn;
        tr.r = r_learn;
        tr.s_next = make_state(diffs, t + 1, h, a_learn);
        buffer.push(std::move(tr));

        const auto loss = train_step(agent, buffer);

        bool copied = false;
        if (step_no % agent.cfg.copy_check_every == 0) {
            copied = maybe_copy(agent, a_trade);
        }

        trade_prev = a_trade;
        learner_prev = a_learn;

        trace.trade_actions.push_back(a_trade);
        trace.learner_actions.push_back(a_learn);
        trace.learner_rewards.push_back(r_learn);
        trace.trade_rewards.push_back(r_trade);
        trace.losses.push_back(loss);
        trace.copied.push_back(copied);

        if (observer) observer(step_no, trace, agent);
    }
    return trace;
}

void write_trace_csv(const RunTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write trace file: " + path);
    out << "step,trade_action,learner_action,learner_reward,loss,copied\n";
    char buf[128];
    for (std::size_t i = 0; i < trace.steps(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu,%d,%d,%.17g,", i,
                      action_value(trace.trade_actions[i]),
                      action_value(trace.learner_actions[i]),
                      trace.learner_rewards[i]);
        out << buf;
        if (trace.losses[i]) {
            std::snprintf(buf, sizeof(buf), "%.17g", *trace.losses[i]);
            out << buf;
        }
        out << ',' << (trace.copied[i] ? 1 : 0) << '\n';
    }
}

}  // namespace trader
