#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "trader/runner.hpp"

using namespace trader;
namespace fs = std::filesystem;

namespace {

RunSpec small_spec(const std::string& out) {
    RunSpec spec;
    SyntheticSpec sp;
    sp.kind = SyntheticKind::Sine;
    sp.n = 400;
    sp.period = 25;
    sp.seed = 1;
    spec.synthetic = sp;
    spec.agent.horizon = 6;
    spec.agent.dims.input_size = 7;
    spec.agent.dims.lstm_hidden = 4;
    spec.agent.dims.fc_hidden = 4;
    spec.agent.buffer_cap = 200;
    spec.agent.batch = 8;
    spec.agent.lr = 0.01;
    spec.agent.seed = 1;
    spec.agent.trade_warmup = 50;
    spec.out_dir = out;
    return spec;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("run_sweep writes all artifacts and is deterministic") {
    auto spec = small_spec("/tmp/runner_a");
    fs::remove_all(spec.out_dir);
    auto rows1 = run_sweep(spec);
    REQUIRE(rows1.size() == 1);

    for (const char* f : {"trace.csv", "metrics.csv", "metrics.json",
                          "theta.json", "phi.json", "config.json",
                          "report.csv", "report.json"}) {
        CHECK(fs::exists(spec.out_dir + "/" + std::string(f)));
    }

    auto spec2 = small_spec("/tmp/runner_b");
    fs::remove_all(spec2.out_dir);
    run_sweep(spec2);
    for (const char* f : {"trace.csv", "metrics.csv", "theta.json", "phi.json",
                          "report.csv"}) {
        CHECK(slurp(spec.out_dir + "/" + f) == slurp(spec2.out_dir + "/" + f));
    }
}

TEST_CASE("emitted files round-trip through the project's own loaders") {
    auto spec = small_spec("/tmp/runner_rt");
    fs::remove_all(spec.out_dir);
    run_sweep(spec);
    auto rows = parse_report(slurp(spec.out_dir + "/report.csv"),
                             ReportFormat::Csv);
    REQUIRE(rows.size() == 1);
    auto rows_j = parse_report(slurp(spec.out_dir + "/report.json"),
                               ReportFormat::Json);
    CHECK(rows_j[0].report.trade_num == rows[0].report.trade_num);
    auto theta = load_checkpoint(spec.out_dir + "/theta.json");
    CHECK(theta.dims.input_size == spec.agent.dims.input_size);
}

TEST_CASE("missing CSV path fails naming the path") {
    auto spec = small_spec("/tmp/runner_missing");
    spec.synthetic.reset();
    spec.csv_path = "/tmp/no_such_data_file.csv";
    try {
        run_sweep(spec);
        FAIL("expected an error");
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find("/tmp/no_such_data_file.csv") !=
              std::string::npos);
    }
}

TEST_CASE("spec must name exactly one data source") {
    auto spec = small_spec("/tmp/runner_dup");
    spec.csv_path = "x.csv";  // and synthetic is still set
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec.csv_path.reset();
    spec.synthetic.reset();
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("sweep over multiple costs yields one row per cost") {
    auto spec = small_spec("/tmp/runner_sweep");
    fs::remove_all(spec.out_dir);
    spec.costs = {0.0, 0.05, 0.2};
    auto rows = run_sweep(spec);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].cost == 0.0);
    CHECK(rows[1].cost == 0.05);
    CHECK(rows[2].cost == 0.2);
    for (int i = 0; i < 3; ++i) {
        CHECK(fs::exists(spec.out_dir + "/cost_" + std::to_string(i) +
                         "/trace.csv"));
    }
    auto parsed = parse_report(slurp(spec.out_dir + "/report.csv"),
                               ReportFormat::Csv);
    CHECK(parsed.size() == 3);
}

TEST_CASE("cost-pct converts against the first close") {
    auto spec = small_spec("/tmp/runner_pct");
    spec.cost_pct = 0.02;
    auto series = load_run_data(spec);
    auto costs = resolve_costs(spec, series);
    REQUIRE(costs.size() == 1);
    CHECK(costs[0] == doctest::Approx(0.0002 * series.close(0)));
}

TEST_CASE("baseline sweep runs and is deterministic") {
    auto spec = small_spec("/tmp/runner_base_a");
    fs::remove_all(spec.out_dir);
    spec.costs = {0.05};
    spec.baseline_epochs = 2;
    auto rows1 = run_baseline_sweep(spec);
    REQUIRE(rows1.size() == 1);

    auto spec2 = small_spec("/tmp/runner_base_b");
    fs::remove_all(spec2.out_dir);
    spec2.costs = {0.05};
    spec2.baseline_epochs = 2;
    run_baseline_sweep(spec2);
    CHECK(slurp(spec.out_dir + "/baseline_report.csv") ==
          slurp(spec2.out_dir + "/baseline_report.csv"));
}

TEST_CASE("gradcheck passes at defaults and the negative control fails") {
    GradCheckSpec gc;
    gc.dims.input_size = 5;
    gc.dims.lstm_hidden = 4;
    gc.dims.fc_hidden = 4;
    gc.trials = 2;
    auto ok = run_gradcheck(gc);
    CHECK(ok.pass);

    gc.corrupt_index = 3;
    auto bad = run_gradcheck(gc);
    CHECK_FALSE(bad.pass);

    gc.corrupt_index = -1;
    gc.tolerance = 0.0;  // nothing beats an exact-zero tolerance
    CHECK_FALSE(run_gradcheck(gc).pass);
}
