#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "trader/runner.hpp"

namespace {

struct CommonOpts {
    std::string data_csv;
    std::string kind = "sine";
    std::size_t n = 10000;
    double amplitude = 1.0;
    double period = 50.0;
    double drift = 0.01;
    double base = 100.0;
    std::uint64_t seed = 0;
    double gamma = 0.8;
    double epsilon = 0.1;
    std::size_t horizon = 32;
    std::size_t buffer = 10000;
    std::size_t batch = 32;
    double lr = 1e-3;
    std::size_t lstm_hidden = 32;
    std::size_t fc_hidden = 16;
    std::size_t warmup = 10000;
    std::vector<double> costs;
    double cost_pct = -1.0;
    std::string out = "out";
    std::string config_path;
    double train_frac = 0.5;
    std::size_t epochs = 5;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path,
                    "JSON config file; flags override its values");
    cmd->add_option("--data", o.data_csv, "CSV file (timestamp,close)");
    cmd->add_option("--kind", o.kind, "synthetic kind: sine|walk|trend");
    cmd->add_option("--n", o.n, "synthetic series length");
    cmd->add_option("--amplitude", o.amplitude, "sine amplitude / walk step");
    cmd->add_option("--period", o.period, "sine period in steps");
    cmd->add_option("--drift", o.drift, "trend drift per step");
    cmd->add_option("--base", o.base, "synthetic base price");
    cmd->add_option("--seed", o.seed, "run seed");
    cmd->add_option("--gamma", o.gamma, "discount rate");
    cmd->add_option("--epsilon", o.epsilon, "exploration rate");
    cmd->add_option("--horizon", o.horizon, "diff window H");
    cmd->add_option("--buffer", o.buffer, "replay buffer capacity L");
    cmd->add_option("--batch", o.batch, "minibatch size N");
    cmd->add_option("--lr", o.lr, "learning rate");
    cmd->add_option("--lstm-hidden", o.lstm_hidden, "LSTM hidden width");
    cmd->add_option("--fc-hidden", o.fc_hidden, "dense sublayer width");
    cmd->add_option("--warmup", o.warmup,
                    "steps the trader stays flat before going live");
    cmd->add_option("--cost", o.costs, "absolute cost(s) in price units");
    cmd->add_option("--cost-pct", o.cost_pct,
                    "cost as percent of the first close");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--train-frac", o.train_frac, "baseline training split");
    cmd->add_option("--epochs", o.epochs, "baseline training epochs");
}

void apply_config_file(const CLI::App* cmd, CommonOpts& o) {
    if (o.config_path.empty()) return;
    std::ifstream in(o.config_path);
    if (!in) throw std::runtime_error("cannot open config: " + o.config_path);
    nlohmann::json j;
    in >> j;
    auto flag_given = [&](const std::string& name) {
        return cmd->count(name) > 0;
    };
    auto set = [&](const char* key, const char* flag, auto& field) {
        if (j.contains(key) && !flag_given(flag)) {
            field = j.at(key).get<std::decay_t<decltype(field)>>();
        }
    };
    set("data", "--data", o.data_csv);
    set("kind", "--kind", o.kind);
    set("n", "--n", o.n);
    set("amplitude", "--amplitude", o.amplitude);
    set("period", "--period", o.period);
    set("drift", "--drift", o.drift);
    set("base", "--base", o.base);
    set("seed", "--seed", o.seed);
    set("gamma", "--gamma", o.gamma);
    set("epsilon", "--epsilon", o.epsilon);
    set("horizon", "--horizon", o.horizon);
    set("buffer", "--buffer", o.buffer);
    set("batch", "--batch", o.batch);
    set("lr", "--lr", o.lr);
    set("lstm_hidden", "--lstm-hidden", o.lstm_hidden);
    set("fc_hidden", "--fc-hidden", o.fc_hidden);
    set("warmup", "--warmup", o.warmup);
    set("cost", "--cost", o.costs);
    set("cost_pct", "--cost-pct", o.cost_pct);
    set("out", "--out", o.out);
    set("train_frac", "--train-frac", o.train_frac);
    set("epochs", "--epochs", o.epochs);
}

trader::RunSpec build_spec(const CommonOpts& o) {
    trader::RunSpec spec;
    if (!o.data_csv.empty()) {
        spec.csv_path = o.data_csv;
    } else {
        trader::SyntheticSpec s;
        s.kind = trader::synthetic_kind_from_string(o.kind);
        s.n = o.n;
        s.base = o.base;
        s.amplitude = o.amplitude;
        s.period = o.period;
        s.drift = o.drift;
        s.seed = o.seed;
        spec.synthetic = s;
    }
    spec.agent.gamma = o.gamma;
    spec.agent.epsilon = o.epsilon;
    spec.agent.buffer_cap = o.buffer;
    spec.agent.batch = o.batch;
    spec.agent.lr = o.lr;
    spec.agent.horizon = o.horizon;
    spec.agent.dims.input_size = o.horizon + 1;
    spec.agent.dims.lstm_hidden = o.lstm_hidden;
    spec.agent.dims.fc_hidden = o.fc_hidden;
    spec.agent.dims.output_size = 3;
    spec.agent.trade_warmup = o.warmup;
    spec.agent.seed = o.seed;
    if (!o.costs.empty()) spec.costs = o.costs;
    if (o.cost_pct >= 0.0) spec.cost_pct = o.cost_pct;
    spec.out_dir = o.out;
    spec.baseline_train_frac = o.train_frac;
    spec.baseline_epochs = o.epochs;
    return spec;
}

void print_rows(const std::vector<trader::ReportRow>& rows) {
    std::cout << trader::emit_report(rows, trader::ReportFormat::Csv);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"online Q-learning trading simulator"};
    app.require_subcommand(1);

    CommonOpts o;

    auto* run = app.add_subcommand("run", "single online run");
    add_common(run, o);
    auto* sweep = app.add_subcommand("sweep", "one run per cost level");
    add_common(sweep, o);
    auto* baseline =
        app.add_subcommand("baseline", "four-class LSTM classifier baseline");
    add_common(baseline, o);

    auto* gen = app.add_subcommand("gen-data", "write a synthetic CSV");
    add_common(gen, o);

    auto* gradcheck =
        app.add_subcommand("gradcheck", "finite-difference gradient check");
    std::size_t gc_h = 8, gc_lstm = 8, gc_fc = 8, gc_trials = 10;
    std::uint64_t gc_seed = 0;
    double gc_tol = 1e-4;
    gradcheck->add_option("--horizon", gc_h, "diff window H");
    gradcheck->add_option("--lstm-hidden", gc_lstm, "LSTM hidden width");
    gradcheck->add_option("--fc-hidden", gc_fc, "dense sublayer width");
    gradcheck->add_option("--seed", gc_seed, "seed");
    gradcheck->add_option("--trials", gc_trials, "number of random nets");
    gradcheck->add_option("--tolerance", gc_tol, "max relative error");

    auto* report = app.add_subcommand(
        "report", "recompute metrics from a saved trace and its data");
    std::string rep_trace, rep_data, rep_out;
    double rep_cost = 0.0;
    std::size_t rep_h = 32;
    report->add_option("--trace", rep_trace, "trace.csv from a run")
        ->required();
    report->add_option("--data", rep_data, "the CSV the run used")->required();
    report->add_option("--cost", rep_cost, "cost in price units");
    report->add_option("--horizon", rep_h, "diff window H of the run");
    report->add_option("--out", rep_out, "write report here (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed() || sweep->parsed()) {
            const CLI::App* cmd = run->parsed() ? run : sweep;
            apply_config_file(cmd, o);
            print_rows(trader::run_sweep(build_spec(o)));
        } else if (baseline->parsed()) {
            apply_config_file(baseline, o);
            print_rows(trader::run_baseline_sweep(build_spec(o)));
        } else if (gen->parsed()) {
            apply_config_file(gen, o);
            trader::SyntheticSpec s;
            s.kind = trader::synthetic_kind_from_string(o.kind);
            s.n = o.n;
            s.base = o.base;
            s.amplitude = o.amplitude;
            s.period = o.period;
            s.drift = o.drift;
            s.seed = o.seed;
            const std::string path = o.out.empty() ? "data.csv" : o.out;
            trader::save_csv(trader::gen_synthetic(s), path);
            std::cout << "wrote " << path << "\n";
        } else if (gradcheck->parsed()) {
            trader::GradCheckSpec spec;
            spec.dims.input_size = gc_h + 1;
            spec.dims.lstm_hidden = gc_lstm;
            spec.dims.fc_hidden = gc_fc;
            spec.seed = gc_seed;
            spec.tolerance = gc_tol;
            spec.trials = gc_trials;
            const auto res = trader::run_gradcheck(spec);
            std::printf("max relative error %.3e (worst %s), tolerance %.3e: %s\n",
                        res.max_rel_error, res.worst_coordinate.c_str(),
                        spec.tolerance, res.pass ? "PASS" : "FAIL");
            return res.pass ? 0 : 1;
        } else if (report->parsed()) {
            const auto series = trader::load_csv(rep_data);
            // trade actions are column 2 of the trace
            std::ifstream in(rep_trace);
            if (!in) throw std::runtime_error("cannot open trace: " + rep_trace);
            std::string line;
            std::getline(in, line);  // header
            std::vector<trader::Action> actions;
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                const auto c1 = line.find(',');
                const auto c2 = line.find(',', c1 + 1);
                actions.push_back(trader::action_from_int(
                    std::stoi(line.substr(c1 + 1, c2 - c1 - 1))));
            }
            const auto slice = trader::trade_price_slice(series, rep_h);
            const auto trades = trader::segment_trades(actions, slice, rep_cost);
            trader::ReportRow row{rep_cost, trader::compute_report(trades)};
            const std::string text =
                trader::emit_report(row, trader::ReportFormat::Csv);
            if (rep_out.empty()) {
                std::cout << text;
            } else {
                std::ofstream out(rep_out);
                if (!out) throw std::runtime_error("cannot write " + rep_out);
                out << text;
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
