#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace trader {

// Position / action: the executed action IS the held position for the
// next interval.
enum class Action : int { Short = -1, Flat = 0, Long = 1 };

inline int action_value(Action a) { return static_cast<int>(a); }

Action action_from_int(int v);  // throws on values outside {-1,0,+1}

// index into a QValues triple / one-hot layouts: short=0, flat=1, long=2
inline int action_index(Action a) { return static_cast<int>(a) + 1; }
inline Action action_from_index(int i) { return static_cast<Action>(i - 1); }

struct PricePoint {
    std::int64_t timestamp = 0;  // epoch seconds
    double close = 0.0;
};

struct PriceSeries {
    std::vector<PricePoint> points;

    std::size_t size() const { return points.size(); }
    double close(std::size_t i) const { return points[i].close; }
};

// H most recent price differences (oldest first) plus the previous action.
struct MarketState {
    std::vector<double> diffs;
    Action prev_action = Action::Flat;
};

// CSV schema: header "timestamp,close"; timestamp ISO-8601 or epoch
// seconds (auto-detected). Throws on malformed rows (with line number),
// non-positive closes and non-monotone timestamps.
PriceSeries load_csv(const std::string& path);
void save_csv(const PriceSeries& series, const std::string& path);

// d[i] = close[i+1] - close[i]; output length = input length - 1.
std::vector<double> diff_series(const PriceSeries& series);

// Window of the H diffs ending at index t, oldest first. Requires t >= H-1.
MarketState make_state(const std::vector<double>& diffs, std::size_t t,
                       std::size_t h, Action prev_action);

enum class SyntheticKind { Sine, RandomWalk, Trend };

SyntheticKind synthetic_kind_from_string(const std::string& s);

struct SyntheticSpec {
    SyntheticKind kind = SyntheticKind::Sine;
    std::size_t n = 1000;
    double base = 100.0;
    double amplitude = 1.0;   // sine amplitude / walk step / trend noise scale
    double period = 50.0;     // sine only
    double drift = 0.01;      // trend only, per step
    std::uint64_t seed = 0;
};

// Deterministic per (spec). Timestamps are 60 s apart starting at 0.
PriceSeries gen_synthetic(const SyntheticSpec& spec);

}  // namespace trader
