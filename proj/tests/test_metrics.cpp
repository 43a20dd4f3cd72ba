#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "trader/env.hpp"
#include "trader/metrics.hpp"

using namespace trader;

namespace {

PriceSeries series_of(std::vector<double> closes) {
    PriceSeries s;
    for (std::size_t i = 0; i < closes.size(); ++i) {
        s.points.push_back({static_cast<std::int64_t>(i) * 60, closes[i]});
    }
    return s;
}

std::vector<Action> actions_of(std::initializer_list<int> vals) {
    std::vector<Action> out;
    for (int v : vals) out.push_back(action_from_int(v));
    return out;
}

// env-side cumulative reward for the same aligned action stream
double env_total(const std::vector<Action>& actions, const PriceSeries& prices,
                 double cost) {
    double total = 0.0;
    int prev = 0;
    for (std::size_t k = 0; k < actions.size(); ++k) {
        const int a = action_value(actions[k]);
        total += a * (prices.close(k + 1) - prices.close(k));
        total -= cost * std::abs(a - prev);
        prev = a;
    }
    return total;
}

}  // namespace

TEST_CASE("single long round trip") {
    auto prices = series_of({100, 100, 102, 102});
    auto trades = segment_trades(actions_of({0, 1, 1, 0}), prices, 0.0);
    REQUIRE(trades.size() == 1);
    CHECK(trades[0].entry_index == 1);
    CHECK(trades[0].exit_index == 3);
    CHECK(trades[0].direction == Action::Long);
    CHECK(trades[0].gross_pnl == doctest::Approx(2.0));
    CHECK(trades[0].net_return_pct == doctest::Approx(2.0));
}

TEST_CASE("all-flat stream yields no trades") {
    auto prices = series_of({100, 101, 102, 101, 100});
    CHECK(segment_trades(actions_of({0, 0, 0, 0}), prices, 0.1).empty());
}

TEST_CASE("reversal splits its cost between adjacent trades") {
    auto prices = series_of({100, 100, 100, 100});
    auto trades = segment_trades(actions_of({0, 1, -1, 0}), prices, 0.1);
    REQUIRE(trades.size() == 2);
    double total_cost = trades[0].cost_paid + trades[1].cost_paid;
    CHECK(total_cost == doctest::Approx(0.1 * 4));
    CHECK(trades[0].cost_paid == doctest::Approx(0.2));
    CHECK(trades[1].cost_paid == doctest::Approx(0.2));
}

TEST_CASE("open position at series end closes at the last price free") {
    auto prices = series_of({100, 100, 103});
    auto trades = segment_trades(actions_of({1, 1}), prices, 0.5);
    REQUIRE(trades.size() == 1);
    CHECK(trades[0].exit_index == 2);
    CHECK(trades[0].gross_pnl == doctest::Approx(3.0));
    CHECK(trades[0].cost_paid == doctest::Approx(0.5));  // entry only
}

TEST_CASE("segment_trades rejects misaligned input") {
    auto prices = series_of({100, 101});
    CHECK_THROWS_AS(segment_trades(actions_of({0, 1, 0}), prices, 0.0),
                    std::invalid_argument);
}

TEST_CASE("segmentation partition: each nonzero step is in exactly one trade") {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> a_dist(-1, 1);
    std::uniform_real_distribution<double> p_dist(-0.5, 0.5);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<Action> actions;
        std::vector<double> closes = {100.0};
        const int n = 50;
        for (int i = 0; i < n; ++i) {
            actions.push_back(action_from_int(a_dist(rng)));
            closes.push_back(closes.back() + p_dist(rng));
        }
        auto trades = segment_trades(actions, series_of(closes), 0.03);
        std::vector<int> covered(n, 0);
        for (const auto& t : trades) {
            for (std::size_t k = t.entry_index; k < t.exit_index; ++k) {
                covered[k]++;
            }
        }
        for (int i = 0; i < n; ++i) {
            CHECK(covered[i] == (action_value(actions[i]) != 0 ? 1 : 0));
        }
    }
}

TEST_CASE("PnL consistency with the env accounting identity") {
    std::mt19937_64 rng(19);
    std::uniform_int_distribution<int> a_dist(-1, 1);
    std::uniform_real_distribution<double> p_dist(-0.5, 0.5);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Action> actions;
        std::vector<double> closes = {50.0};
        for (int i = 0; i < 80; ++i) {
            actions.push_back(action_from_int(a_dist(rng)));
            closes.push_back(closes.back() + p_dist(rng));
        }
        const double cost = trial % 3 == 0 ? 0.0 : 0.08;
        auto prices = series_of(closes);
        auto trades = segment_trades(actions, prices, cost);
        double net = 0.0;
        for (const auto& t : trades) net += t.gross_pnl - t.cost_paid;
        CHECK(std::abs(net - env_total(actions, prices, cost)) < 1e-9);
    }
}

TEST_CASE("compute_report counting") {
    std::vector<TradeRecord> trades(4);
    double rets[4] = {1.0, 1.0, -1.0, 1.0};
    for (int i = 0; i < 4; ++i) {
        trades[i].entry_index = i * 10;
        trades[i].exit_index = i * 10 + 5;
        trades[i].net_return_pct = rets[i];
    }
    auto r = compute_report(trades);
    CHECK(r.trade_num == 4);
    CHECK(r.win_rate == doctest::Approx(75.0));
    CHECK(r.trade_length == doctest::Approx(5.0));
    CHECK(r.return_avg == doctest::Approx(0.5));
    CHECK_FALSE(r.sharpe_degenerate);
    // population stddev of {1,1,-1,1} about mean 0.5 is sqrt(3)/2
    CHECK(r.sharpe_ratio == doctest::Approx(0.5 / (std::sqrt(3.0) / 2.0)));
}

TEST_CASE("single trade reports sharpe 0 with the degenerate flag") {
    std::vector<TradeRecord> trades(1);
    trades[0].exit_index = 3;
    trades[0].net_return_pct = 2.0;
    auto r = compute_report(trades);
    CHECK(r.sharpe_ratio == 0.0);
    CHECK(r.sharpe_degenerate);
}

TEST_CASE("empty input gives the all-zero report") {
    auto r = compute_report({});
    CHECK(r.trade_num == 0);
    CHECK(r.return_avg == 0.0);
    CHECK(r.win_rate == 0.0);
    CHECK(r.sharpe_ratio == 0.0);
    CHECK(r.cumulative_pnl == 0.0);
}

TEST_CASE("win_rate and return_avg invariant under uniform rescaling") {
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<int> a_dist(-1, 1);
    std::uniform_real_distribution<double> p_dist(-0.4, 0.4);
    std::vector<Action> actions;
    std::vector<double> closes = {80.0};
    for (int i = 0; i < 60; ++i) {
        actions.push_back(action_from_int(a_dist(rng)));
        closes.push_back(closes.back() + p_dist(rng));
    }
    const double cost = 0.05, scale = 7.5;
    auto r1 = compute_report(segment_trades(actions, series_of(closes), cost));
    for (double& c : closes) c *= scale;
    auto r2 = compute_report(
        segment_trades(actions, series_of(closes), cost * scale));
    CHECK(r1.win_rate == doctest::Approx(r2.win_rate));
    CHECK(r1.return_avg == doctest::Approx(r2.return_avg).epsilon(1e-9));
}

TEST_CASE("emit_report zero row and parse round trip") {
    ReportRow zero;
    auto text = emit_report(zero, ReportFormat::Csv);
    auto rows = parse_report(text, ReportFormat::Csv);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].report.trade_num == 0);
    CHECK(emit_report(rows, ReportFormat::Csv) == text);
}

TEST_CASE("emit -> parse -> emit is idempotent for both formats") {
    std::vector<ReportRow> rows(3);
    rows[0] = {0.01, {5892, 2.93, 7.0, 59.5, 2.04, 1234.5, false}};
    rows[1] = {0.05, {583, 0.53, 7.1, 49.2, 0.68, -3.25, false}};
    rows[2] = {0.1, {245, -0.11, 9.7, 51.9, -0.40, 0.0, false}};
    for (auto fmt : {ReportFormat::Csv, ReportFormat::Json}) {
        auto text = emit_report(rows, fmt);
        auto parsed = parse_report(text, fmt);
        CHECK(emit_report(parsed, fmt) == text);
    }
}

TEST_CASE("multi-cost sweep renders one row per cost") {
    // shaped like the published per-cost table: five cost levels, one row each
    std::vector<ReportRow> rows;
    for (double c : {0.01, 0.02, 0.05, 0.08, 0.1}) {
        ReportRow row;
        row.cost = c;
        row.report.trade_num = 100;
        rows.push_back(row);
    }
    auto text = emit_report(rows, ReportFormat::Csv);
    std::size_t lines = 0;
    for (char ch : text) {
        if (ch == '\n') ++lines;
    }
    CHECK(lines == 6);  // header + 5 rows
    CHECK(text.rfind("cost,trade_num,return_avg,trade_length,win_rate,"
                     "sharpe_ratio,cumulative_pnl\n",
                     0) == 0);
}
