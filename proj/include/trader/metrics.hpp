#pragma once

#include <string>
#include <vector>

#include "trader/market.hpp"

namespace trader {

// One round trip: a maximal interval of constant nonzero position.
struct TradeRecord {
    std::size_t entry_index = 0;
    std::size_t exit_index = 0;
    Action direction = Action::Long;
    double gross_pnl = 0.0;       // price units
    double cost_paid = 0.0;       // price units
    double net_return_pct = 0.0;  // percent of entry price
};

struct MetricsReport {
    std::size_t trade_num = 0;
    double return_avg = 0.0;    // mean net_return_pct
    double trade_length = 0.0;  // mean steps per trade
    double win_rate = 0.0;      // percent
    double sharpe_ratio = 0.0;
    double cumulative_pnl = 0.0;  // price units, net of cost
    bool sharpe_degenerate = false;  // <2 trades or zero return spread
};

// actions[k] is the position held over the price interval [k, k+1];
// prices hold actions.size() or actions.size()+1 points. A reversal closes
// one trade and opens the next at the same index, its 2-unit cost split
// between them. A position still open at the end closes at the final
// price with no exit charge.
std::vector<TradeRecord> segment_trades(const std::vector<Action>& actions,
                                        const PriceSeries& prices,
                                        double cost_c);

MetricsReport compute_report(const std::vector<TradeRecord>& trades);

struct ReportRow {
    double cost = 0.0;
    MetricsReport report;
};

enum class ReportFormat { Csv, Json };

std::string emit_report(const std::vector<ReportRow>& rows, ReportFormat fmt);
std::string emit_report(const ReportRow& row, ReportFormat fmt);
std::vector<ReportRow> parse_report(const std::string& text, ReportFormat fmt);

}  // namespace trader
