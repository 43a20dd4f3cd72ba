#pragma once

#include <optional>
#include <string>
#include <vector>

#include "trader/agent.hpp"
#include "trader/baseline.hpp"
#include "trader/env.hpp"
#include "trader/market.hpp"
#include "trader/metrics.hpp"

namespace trader {

// One resolved run request: data source, agent/env settings, cost list.
struct RunSpec {
    std::optional<std::string> csv_path;        // exactly one source
    std::optional<SyntheticSpec> synthetic;
    AgentConfig agent;
    std::vector<double> costs = {0.0};          // absolute price units
    std::optional<double> cost_pct;             // converted via first close
    std::string out_dir = "out";
    double baseline_train_frac = 0.5;
    std::size_t baseline_epochs = 5;

    void validate() const;
};

PriceSeries load_run_data(const RunSpec& spec);
std::vector<double> resolve_costs(const RunSpec& spec,
                                  const PriceSeries& series);

struct RunArtifacts {
    ReportRow row;
    RunTrace trace;
};

// Executes one online run at the given cost and writes trace.csv,
// metrics.csv/.json, theta.json, phi.json and config.json into dir.
RunArtifacts run_once(const RunSpec& spec, const PriceSeries& series,
                      double cost, const std::string& dir);

// One run per cost (subdirectories cost_<i>), plus an aggregate
// report.csv / report.json in spec.out_dir. Returns the rows.
std::vector<ReportRow> run_sweep(const RunSpec& spec);

// Front-split training, back-split evaluation, metrics row per cost.
std::vector<ReportRow> run_baseline_sweep(const RunSpec& spec);

// Metrics slice of an agent run: the prices the trade actions act on.
PriceSeries trade_price_slice(const PriceSeries& series, std::size_t horizon);

struct GradCheckSpec {
    NetDims dims;
    std::uint64_t seed = 0;
    double tolerance = 1e-4;
    std::size_t trials = 10;
    long corrupt_index = -1;  // test hook
};

// Returns the worst relative error over the trials; pass iff < tolerance.
struct GradCheckSummary {
    double max_rel_error = 0.0;
    std::string worst_coordinate;
    bool pass = false;
};

GradCheckSummary run_gradcheck(const GradCheckSpec& spec);

}  // namespace trader
