#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "trader/env.hpp"
#include "trader/market.hpp"
#include "trader/netcore.hpp"

namespace trader {

struct AgentConfig {
    double gamma = 0.8;
    double epsilon = 0.1;
    std::size_t buffer_cap = 10000;    // L
    std::size_t batch = 32;            // N
    double lr = 1e-3;
    std::size_t horizon = 32;          // H
    NetDims dims;                      // dims.input_size must equal H + 1
    std::uint64_t seed = 0;
    std::size_t copy_check_every = 1;
    // The trader holds flat (syncing phi from theta every step) until this
    // many transitions have been gathered, then goes live. Prevents phi
    // from freezing on a barely-trained policy the first time it enters a
    // position, since the flat-gated copy cannot fire while one is held.
    std::size_t trade_warmup = 10000;

    void validate() const;
};

struct Transition {
    MarketState s;
    Action a = Action::Flat;
    double r = 0.0;
    MarketState s_next;  // s_next.prev_action == a
};

// Bounded FIFO: insertion beyond capacity evicts the oldest.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(Transition t);
    std::size_t size() const { return slots_.size(); }
    std::size_t capacity() const { return capacity_; }
    const Transition& at(std::size_t i) const { return slots_[i]; }

private:
    std::size_t capacity_;
    std::deque<Transition> slots_;
};

struct DualAgent {
    NetworkParams theta;  // learner
    NetworkParams phi;    // trader
    AgentConfig cfg;
    std::mt19937_64 rng;
};

DualAgent make_agent(const AgentConfig& cfg);

// argmax over the three Q values; ties prefer flat, then long, then short.
Action select_greedy(const NetworkParams& params, const MarketState& s);

Action select_epsilon_greedy(const NetworkParams& params, const MarketState& s,
                             double epsilon, std::mt19937_64& rng);

// y = r + gamma * Q(s_next, a) where a is the transition's own action.
double td_target(double r, double gamma, double q_next_same_action);

// called once per sampled transition with the bootstrap value actually used
struct TrainObserver {
    std::function<void(const Transition&, double q_next_used)> on_sample;
};

// One averaged SGD step on theta over a uniform without-replacement
// minibatch; phi untouched. Returns the mean batch loss, or nullopt when
// the buffer holds fewer than batch transitions (no-op).
std::optional<double> train_step(DualAgent& agent, const ReplayBuffer& buffer,
                                 const TrainObserver* obs = nullptr);

// phi <- theta iff the last trade action is flat.
bool maybe_copy(DualAgent& agent, Action last_trade_action);

struct RunTrace {
    std::vector<Action> trade_actions;
    std::vector<Action> learner_actions;
    std::vector<double> learner_rewards;
    std::vector<double> trade_rewards;
    std::vector<std::optional<double>> losses;
    std::vector<bool> copied;

    double cumulative_trade_reward() const;
    std::size_t steps() const { return trade_actions.size(); }
};

// invoked after every step of run_online, before the next iteration
using StepObserver =
    std::function<void(std::size_t step, const RunTrace&, const DualAgent&)>;

// Full online loop: the trader phi executes greedily, the learner theta
// explores epsilon-greedily, only learner experience enters the buffer,
// and phi is refreshed from theta whenever the trade action is flat.
// Two position ledgers run in parallel (trade vs learner).
RunTrace run_online(DualAgent& agent, const PriceSeries& series,
                    const EnvConfig& env_cfg,
                    const StepObserver& observer = nullptr);

void write_trace_csv(const RunTrace& trace, const std::string& path);

}  // namespace trader
