#include "trader/market.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace trader {

Action action_from_int(int v) {
    if (v < -1 || v > 1) {
        throw std::invalid_argument("action must be -1, 0 or +1, got " +
                                    std::to_string(v));
    }
    return static_cast<Action>(v);
}

namespace {

std::int64_t parse_timestamp(const std::string& field, std::size_t line_no) {
    if (field.find('-') != std::string::npos) {
        // ISO-8601, 'T' or space separator, optional trailing 'Z'
        std::tm tm{};
        int y, mo, d, h = 0, mi = 0, s = 0;
        char sep = 0;
        int n = std::sscanf(field.c_str(), "%d-%d-%d%c%d:%d:%d", &y, &mo, &d,
                            &sep, &h, &mi, &s);
        if (n != 3 && n != 7) {
            throw std::runtime_error("line " + std::to_string(line_no) +
                                     ": bad timestamp '" + field + "'");
        }
        tm.tm_year = y - 1900;
        tm.tm_mon = mo - 1;
        tm.tm_mday = d;
        tm.tm_hour = h;
        tm.tm_min = mi;
        tm.tm_sec = s;
        return static_cast<std::int64_t>(timegm(&tm));
    }
    try {
        std::size_t pos = 0;
        std::int64_t v = std::stoll(field, &pos);
        if (pos != field.size()) throw std::invalid_argument(field);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("line " + std::to_string(line_no) +
                                 ": bad timestamp '" + field + "'");
    }
}

}  // namespace

PriceSeries load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open CSV file: " + path);

    PriceSeries series;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line_no == 1 && line.rfind("timestamp", 0) == 0) continue;

        auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw std::runtime_error("line " + std::to_string(line_no) +
                                     ": expected 'timestamp,close'");
        }
        std::string ts_field = line.substr(0, comma);
        std::string close_field = line.substr(comma + 1);

        PricePoint p;
        p.timestamp = parse_timestamp(ts_field, line_no);
        try {
            std::size_t pos = 0;
            p.close = std::stod(close_field, &pos);
            if (pos != close_field.size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw std::runtime_error("line " + std::to_string(line_no) +
                                     ": bad close '" + close_field + "'");
        }
        if (!(p.close > 0.0)) {
            throw std::runtime_error("line " + std::to_string(line_no) +
                                     ": close must be positive");
        }
        if (!series.points.empty() &&
            p.timestamp <= series.points.back().timestamp) {
            throw std::runtime_error("line " + std::to_string(line_no) +
                                     ": timestamps must be strictly increasing");
        }
        series.points.push_back(p);
    }
    return series;
}

void save_csv(const PriceSeries& series, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write CSV file: " + path);
    out << "timestamp,close\n";
    char buf[64];
    for (const auto& p : series.points) {
        std::snprintf(buf, sizeof(buf), "%lld,%.17g",
                      static_cast<long long>(p.timestamp), p.close);
        out << buf << '\n';
    }
}

std::vector<double> diff_series(const PriceSeries& series) {
    if (series.size() < 2) {
        throw std::invalid_argument("diff_series needs at least 2 points");
    }
    std::vector<double> d(series.size() - 1);
    for (std::size_t i = 0; i + 1 < series.size(); ++i) {
        d[i] = series.close(i + 1) - series.close(i);
    }
    return d;
}

MarketState make_state(const std::vector<double>& diffs, std::size_t t,
                       std::size_t h, Action prev_action) {
    if (h < 1) throw std::invalid_argument("horizon must be >= 1");
    if (t >= diffs.size() || t + 1 < h) {
        throw std::invalid_argument("insufficient history: t=" +
                                    std::to_string(t) + " H=" +
                                    std::to_string(h));
    }
    MarketState s;
    s.diffs.assign(diffs.begin() + (t + 1 - h), diffs.begin() + (t + 1));
    s.prev_action = prev_action;
    return s;
}

SyntheticKind synthetic_kind_from_string(const std::string& s) {
    if (s == "sine") return SyntheticKind::Sine;
    if (s == "walk" || s == "random-walk") return SyntheticKind::RandomWalk;
    if (s == "trend") return SyntheticKind::Trend;
    throw std::invalid_argument("unknown synthetic kind: " + s);
}

PriceSeries gen_synthetic(const SyntheticSpec& spec) {
    if (spec.n < 2) throw std::invalid_argument("synthetic series needs n >= 2");

    PriceSeries series;
    series.points.reserve(spec.n);
    std::mt19937_64 rng(spec.seed);

    double level = spec.base;
    constexpr double two_pi = 6.283185307179586476925286766559;
    for (std::size_t t = 0; t < spec.n; ++t) {
        double close = 0.0;
        switch (spec.kind) {
            case SyntheticKind::Sine:
                close = spec.base +
                        spec.amplitude * std::sin(two_pi * static_cast<double>(t) /
                                                  spec.period);
                break;
            case SyntheticKind::RandomWalk: {
                if (t > 0) {
                    bool up = std::uniform_int_distribution<int>(0, 1)(rng) == 1;
                    level += up ? spec.amplitude : -spec.amplitude;
                }
                close = level;
                break;
            }
            case SyntheticKind::Trend: {
                double noise =
                    std::uniform_real_distribution<double>(-1.0, 1.0)(rng) *
                    spec.amplitude;
                close = spec.base + spec.drift * static_cast<double>(t) + noise;
                break;
            }
        }
        if (!(close > 0.0)) {
            throw std::invalid_argument(
                "synthetic parameters produced a non-positive price");
        }
        series.points.push_back({static_cast<std::int64_t>(t) * 60, close});
    }
    return series;
}

}  // namespace trader
