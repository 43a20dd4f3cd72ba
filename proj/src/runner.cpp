#include "trader/runner.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>

#include <json.hpp>

namespace fs = std::filesystem;

namespace trader {

void RunSpec::validate() const {
    if (csv_path.has_value() == synthetic.has_value()) {
        throw std::invalid_argument(
            "exactly one data source (csv or synthetic) must be given");
    }
    for (double c : costs) {
        if (c < 0.0) throw std::invalid_argument("costs must be >= 0");
    }
    if (cost_pct && *cost_pct < 0.0) {
        throw std::invalid_argument("cost percentage must be >= 0");
    }
    agent.validate();
}

PriceSeries load_run_data(const RunSpec& spec) {
    if (spec.csv_path) return load_csv(*spec.csv_path);
    return gen_synthetic(*spec.synthetic);
}

std::vector<double> resolve_costs(const RunSpec& spec,
                                  const PriceSeries& series) {
    if (spec.cost_pct) {
        if (series.size() == 0) throw std::invalid_argument("empty series");
        return {*spec.cost_pct / 100.0 * series.close(0)};
    }
    return spec.costs;
}

PriceSeries trade_price_slice(const PriceSeries& series, std::size_t horizon) {
    if (series.size() < horizon + 2) {
        throw std::invalid_argument("series too short");
    }
    PriceSeries slice;
    slice.points.assign(series.points.begin() + horizon, series.points.end());
    return slice;
}

namespace {

nlohmann::json spec_to_json(const RunSpec& spec, double cost) {
    nlohmann::json j;
    if (spec.csv_path) {
        j["data"] = {{"csv", *spec.csv_path}};
    } else {
        const auto& s = *spec.synthetic;
        const char* kind = s.kind == SyntheticKind::Sine
                               ? "sine"
                               : (s.kind == SyntheticKind::RandomWalk ? "walk"
                                                                      : "trend");
        j["data"] = {{"synthetic",
                      {{"kind", kind},
                       {"n", s.n},
                       {"base", s.base},
                       {"amplitude", s.amplitude},
                       {"period", s.period},
                       {"drift", s.drift},
                       {"seed", s.seed}}}};
    }
    j["agent"] = {{"gamma", spec.agent.gamma},
                  {"epsilon", spec.agent.epsilon},
                  {"buffer", spec.agent.buffer_cap},
                  {"batch", spec.agent.batch},
                  {"lr", spec.agent.lr},
                  {"horizon", spec.agent.horizon},
                  {"lstm_hidden", spec.agent.dims.lstm_hidden},
                  {"fc_hidden", spec.agent.dims.fc_hidden},
                  {"trade_warmup", spec.agent.trade_warmup},
                  {"seed", spec.agent.seed}};
    j["cost"] = cost;
    return j;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

}  // namespace

RunArtifacts run_once(const RunSpec& spec, const PriceSeries& series,
                      double cost, const std::string& dir) {
    fs::create_directories(dir);

    DualAgent agent = make_agent(spec.agent);
    EnvConfig env_cfg{cost, spec.agent.horizon};
    RunTrace trace = run_online(agent, series, env_cfg);

    const PriceSeries slice = trade_price_slice(series, spec.agent.horizon);
    const auto trades = segment_trades(trace.trade_actions, slice, cost);

    RunArtifacts art;
    art.row = ReportRow{cost, compute_report(trades)};
    art.trace = std::move(trace);

    write_trace_csv(art.trace, dir + "/trace.csv");
    write_text(dir + "/metrics.csv", emit_report(art.row, ReportFormat::Csv));
    write_text(dir + "/metrics.json", emit_report(art.row, ReportFormat::Json));
    save_checkpoint(agent.theta, dir + "/theta.json");
    save_checkpoint(agent.phi, dir + "/phi.json");
    write_text(dir + "/config.json", spec_to_json(spec, cost).dump(2) + "\n");
    return art;
}

std::vector<ReportRow> run_sweep(const RunSpec& spec) {
    spec.validate();
    const PriceSeries series = load_run_data(spec);
    const auto costs = resolve_costs(spec, series);
    fs::create_directories(spec.out_dir);

    std::vector<ReportRow> rows;
    for (std::size_t i = 0; i < costs.size(); ++i) {
        const std::string dir =
            costs.size() == 1 ? spec.out_dir
                              : spec.out_dir + "/cost_" + std::to_string(i);
        rows.push_back(run_once(spec, series, costs[i], dir).row);
    }
    write_text(spec.out_dir + "/report.csv",
               emit_report(rows, ReportFormat::Csv));
    write_text(spec.out_dir + "/report.json",
               emit_report(rows, ReportFormat::Json));
    return rows;
}

std::vector<ReportRow> run_baseline_sweep(const RunSpec& spec) {
    spec.validate();
    const PriceSeries series = load_run_data(spec);
    const auto costs = resolve_costs(spec, series);
    fs::create_directories(spec.out_dir);

    std::vector<ReportRow> rows;
    for (double cost : costs) {
        BaselineConfig cfg;
        cfg.horizon = spec.agent.horizon;
        cfg.cost_c = cost;
        cfg.lstm_hidden = spec.agent.dims.lstm_hidden;
        cfg.fc_hidden = spec.agent.dims.fc_hidden;
        cfg.lr = spec.agent.lr;
        cfg.batch = spec.agent.batch;
        cfg.epochs = spec.baseline_epochs;
        cfg.train_frac = spec.baseline_train_frac;
        cfg.seed = spec.agent.seed;

        BaselineRun run = run_baseline(series, cfg);
        const auto trades = segment_trades(run.actions, run.eval_prices, cost);
        rows.push_back(ReportRow{cost, compute_report(trades)});
    }
    write_text(spec.out_dir + "/baseline_report.csv",
               emit_report(rows, ReportFormat::Csv));
    write_text(spec.out_dir + "/baseline_report.json",
               emit_report(rows, ReportFormat::Json));
    return rows;
}

GradCheckSummary run_gradcheck(const GradCheckSpec& spec) {
    GradCheckSummary summary;
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> diff_dist(-1.0, 1.0);
    std::uniform_int_distribution<int> act_dist(0, 2);

    for (std::size_t trial = 0; trial < spec.trials; ++trial) {
        NetworkParams params = init_params(spec.dims, spec.seed + trial + 1);
        MarketState state;
        state.diffs.resize(spec.dims.horizon());
        for (double& d : state.diffs) d = diff_dist(rng);
        state.prev_action = action_from_index(act_dist(rng));
        const Action action = action_from_index(act_dist(rng));
        const double target = diff_dist(rng) * 2.0;

        const auto res = grad_check(params, state, action, target, 1e-5,
                                    spec.corrupt_index);
        if (res.max_rel_error > summary.max_rel_error) {
            summary.max_rel_error = res.max_rel_error;
            summary.worst_coordinate = res.worst_coordinate;
        }
    }
    summary.pass = summary.max_rel_error < spec.tolerance;
    return summary;
}

}  // namespace trader
