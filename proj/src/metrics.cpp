#include "trader/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace trader {

std::vector<TradeRecord> segment_trades(const std::vector<Action>& actions,
                                        const PriceSeries& prices,
                                        double cost_c) {
    // actions may align one-to-one with price indices, or carry one more
    // price for the final holding interval
    if (prices.size() != actions.size() && prices.size() != actions.size() + 1) {
        throw std::invalid_argument(
            "segment_trades: prices must hold actions.size() or "
            "actions.size()+1 points");
    }
    if (cost_c < 0.0) throw std::invalid_argument("cost must be >= 0");

    std::vector<TradeRecord> trades;
    bool open = false;
    TradeRecord cur;
    int prev = 0;

    auto close_at = [&](std::size_t exit_idx, double extra_cost) {
        cur.exit_index = exit_idx;
        cur.cost_paid += extra_cost;
        cur.gross_pnl = action_value(cur.direction) *
                        (prices.close(exit_idx) - prices.close(cur.entry_index));
        cur.net_return_pct = 100.0 * (cur.gross_pnl - cur.cost_paid) /
                             prices.close(cur.entry_index);
        trades.push_back(cur);
        open = false;
    };
    auto open_at = [&](std::size_t entry_idx, int dir, double entry_cost) {
        cur = TradeRecord{};
        cur.entry_index = entry_idx;
        cur.direction = action_from_int(dir);
        cur.cost_paid = entry_cost;
        open = true;
    };

    for (std::size_t k = 0; k < actions.size(); ++k) {
        const int pos = action_value(actions[k]);
        if (pos != prev) {
            if (prev == 0) {
                open_at(k, pos, cost_c);
            } else if (pos == 0) {
                close_at(k, cost_c);
            } else {
                // direct reversal: the 2-unit change splits between the
                // closing and opening trades
                close_at(k, cost_c);
                open_at(k, pos, cost_c);
            }
        }
        prev = pos;
    }
    if (open) close_at(prices.size() - 1, 0.0);  // forced close at series end
    return trades;
}

MetricsReport compute_report(const std::vector<TradeRecord>& trades) {
    MetricsReport r;
    r.trade_num = trades.size();
    if (trades.empty()) {
        r.sharpe_degenerate = true;
        return r;
    }
    double sum_ret = 0.0, sum_len = 0.0;
    std::size_t wins = 0;
    for (const auto& t : trades) {
        sum_ret += t.net_return_pct;
        sum_len += static_cast<double>(t.exit_index - t.entry_index);
        if (t.net_return_pct > 0.0) ++wins;
        r.cumulative_pnl += t.gross_pnl - t.cost_paid;
    }
    const double n = static_cast<double>(trades.size());
    r.return_avg = sum_ret / n;
    r.trade_length = sum_len / n;
    r.win_rate = 100.0 * static_cast<double>(wins) / n;

    double ss = 0.0;
    for (const auto& t : trades) {
        const double d = t.net_return_pct - r.return_avg;
        ss += d * d;
    }
    const double stddev = std::sqrt(ss / n);  // population
    if (trades.size() < 2 || stddev == 0.0) {
        r.sharpe_ratio = 0.0;
        r.sharpe_degenerate = true;
    } else {
        r.sharpe_ratio = r.return_avg / stddev;
    }
    return r;
}

namespace {
constexpr const char* kCsvHeader =
    "cost,trade_num,return_avg,trade_length,win_rate,sharpe_ratio,"
    "cumulative_pnl";

std::string format_row(const ReportRow& row) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%.17g,%zu,%.17g,%.17g,%.17g,%.17g,%.17g",
                  row.cost, row.report.trade_num, row.report.return_avg,
                  row.report.trade_length, row.report.win_rate,
                  row.report.sharpe_ratio, row.report.cumulative_pnl);
    return buf;
}
}  // namespace

std::string emit_report(const std::vector<ReportRow>& rows, ReportFormat fmt) {
    if (fmt == ReportFormat::Csv) {
        std::string out = kCsvHeader;
        out += '\n';
        for (const auto& row : rows) {
            out += format_row(row);
            out += '\n';
        }
        return out;
    }
    nlohmann::json j = nlohmann::json::array();
    for (const auto& row : rows) {
        j.push_back({{"cost", row.cost},
                     {"trade_num", row.report.trade_num},
                     {"return_avg", row.report.return_avg},
                     {"trade_length", row.report.trade_length},
                     {"win_rate", row.report.win_rate},
                     {"sharpe_ratio", row.report.sharpe_ratio},
                     {"cumulative_pnl", row.report.cumulative_pnl}});
    }
    return j.dump(2) + "\n";
}

std::string emit_report(const ReportRow& row, ReportFormat fmt) {
    return emit_report(std::vector<ReportRow>{row}, fmt);
}

std::vector<ReportRow> parse_report(const std::string& text, ReportFormat fmt) {
    std::vector<ReportRow> rows;
    if (fmt == ReportFormat::Csv) {
        std::istringstream in(text);
        std::string line;
        bool first = true;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            if (first) {
                if (line != kCsvHeader) {
                    throw std::runtime_error("unexpected report header");
                }
                first = false;
                continue;
            }
            ReportRow row;
            unsigned long long tn = 0;
            if (std::sscanf(line.c_str(), "%lg,%llu,%lg,%lg,%lg,%lg,%lg",
                            &row.cost, &tn, &row.report.return_avg,
                            &row.report.trade_length, &row.report.win_rate,
                            &row.report.sharpe_ratio,
                            &row.report.cumulative_pnl) != 7) {
                throw std::runtime_error("malformed report row: " + line);
            }
            row.report.trade_num = static_cast<std::size_t>(tn);
            row.report.sharpe_degenerate = row.report.trade_num < 2;
            rows.push_back(row);
        }
        return rows;
    }
    nlohmann::json j = nlohmann::json::parse(text);
    for (const auto& e : j) {
        ReportRow row;
        row.cost = e.at("cost").get<double>();
        row.report.trade_num = e.at("trade_num").get<std::size_t>();
        row.report.return_avg = e.at("return_avg").get<double>();
        row.report.trade_length = e.at("trade_length").get<double>();
        row.report.win_rate = e.at("win_rate").get<double>();
        row.report.sharpe_ratio = e.at("sharpe_ratio").get<double>();
        row.report.cumulative_pnl = e.at("cumulative_pnl").get<double>();
        row.report.sharpe_degenerate = row.report.trade_num < 2;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace trader
