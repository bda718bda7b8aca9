#pragma once

// Tariff cost model and objective evaluators.
//
// State convention throughout the library: 0 = fixed-rate plan, 1 = variable-rate plan.
// Every schedule starts from an implicit s_0 = 0.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "planswitch/error.hpp"

namespace planswitch {

using State = std::uint8_t;

inline constexpr State kFixed = 0;
inline constexpr State kVariable = 1;

/// One month of exogenous data: demand e, fixed rate p0, variable rate p1, base load B.
struct SlotInput {
    double demand_kwh = 0.0;
    double fixed_rate = 0.0;
    double variable_rate = 0.0;
    double base_load_kwh = 0.0;
};

enum class FeeMode { literal, transition_only };

struct TariffParams {
    double underusage_rate = 0.0; // H
    double beta = 0.0;            // constant cancellation fee
    double alpha = 0.0;           // fee per residual contract month
    int contract_len = 1;         // L

    /// Parameters for the decreasing-fee problem, where beta is pinned to alpha * L.
    static TariffParams decreasing(double underusage_rate, double alpha, int contract_len) {
        TariffParams p{underusage_rate, alpha * contract_len, alpha, contract_len};
        p.validate();
        return p;
    }

    void validate() const {
        if (!(std::isfinite(underusage_rate) && underusage_rate >= 0.0))
            throw ValidationError("underusage rate must be finite and >= 0");
        if (!(std::isfinite(beta) && beta >= 0.0)) throw ValidationError("beta must be finite and >= 0");
        if (!(std::isfinite(alpha) && alpha >= 0.0)) throw ValidationError("alpha must be finite and >= 0");
        if (contract_len < 1) throw ValidationError("contract length must be >= 1");
    }
};

struct Trace {
    std::vector<SlotInput> slots;

    std::size_t size() const noexcept { return slots.size(); }
};

struct CostPair {
    double g0 = 0.0; // cost of staying on the fixed-rate plan this slot
    double g1 = 0.0; // cost of the variable-rate plan this slot

    double at(State s) const noexcept { return s == kFixed ? g0 : g1; }
    friend bool operator==(const CostPair&, const CostPair&) = default;
};

struct CostSeries {
    std::vector<CostPair> pairs;

    CostSeries() = default;
    CostSeries(std::initializer_list<CostPair> init) : pairs(init) {}
    explicit CostSeries(std::vector<CostPair> p) : pairs(std::move(p)) {}

    std::size_t size() const noexcept { return pairs.size(); }
    const CostPair& operator[](std::size_t i) const { return pairs[i]; }
    friend bool operator==(const CostSeries&, const CostSeries&) = default;
};

struct Schedule {
    std::vector<State> states;

    Schedule() = default;
    Schedule(std::initializer_list<State> init) : states(init) {}
    explicit Schedule(std::vector<State> s) : states(std::move(s)) {}

    std::size_t size() const noexcept { return states.size(); }
    State operator[](std::size_t i) const { return states[i]; }
    friend bool operator==(const Schedule&, const Schedule&) = default;
    friend auto operator<=>(const Schedule&, const Schedule&) = default;
};

/// Closed, 1-based slot interval [start, end].
struct ZeroRun {
    std::size_t start = 0;
    std::size_t end = 0;

    std::size_t length() const noexcept { return end - start + 1; }
    friend bool operator==(const ZeroRun&, const ZeroRun&) = default;
};

namespace detail {

inline double positive_part(double x) noexcept { return x > 0.0 ? x : 0.0; }

inline void require_finite_nonneg(double v, const char* name) {
    if (!std::isfinite(v)) throw ValidationError(std::string(name) + " is not finite");
    if (v < 0.0) throw ValidationError(std::string(name) + " is negative");
}

inline void validate_slot(const SlotInput& s) {
    require_finite_nonneg(s.demand_kwh, "demand");
    require_finite_nonneg(s.fixed_rate, "fixed rate");
    require_finite_nonneg(s.variable_rate, "variable rate");
    require_finite_nonneg(s.base_load_kwh, "base load");
}

inline void require_same_length(std::size_t a, std::size_t b) {
    if (a != b)
        throw ValidationError("length mismatch: schedule has " + std::to_string(a) + " slots, costs have " +
                              std::to_string(b));
}

inline void validate_schedule(const Schedule& s) {
    for (State v : s.states)
        if (v > 1) throw ValidationError("schedule entries must be 0 or 1");
}

} // namespace detail

/// Monthly bill of one slot under the given plan.
///
/// The variable plan pays e*p1. The fixed plan pays e*p0, is charged the variable rate on the
/// excess above 1.1B, and the underusage term H*(0.9B - e)^+ is subtracted.
inline double slot_cost(const SlotInput& slot, double underusage_rate, State plan) {
    detail::validate_slot(slot);
    detail::require_finite_nonneg(underusage_rate, "underusage rate");
    const double e = slot.demand_kwh;
    if (plan == kVariable) return e * slot.variable_rate;
    if (plan != kFixed) throw ValidationError("plan must be 0 or 1");
    const double over = detail::positive_part(e - 1.1 * slot.base_load_kwh);
    const double under = detail::positive_part(0.9 * slot.base_load_kwh - e);
    return e * slot.fixed_rate + (slot.variable_rate - slot.fixed_rate) * over - underusage_rate * under;
}

inline CostSeries cost_series(const Trace& trace, double underusage_rate) {
    if (trace.slots.empty()) throw ValidationError("trace is empty");
    CostSeries cs;
    cs.pairs.reserve(trace.size());
    for (const auto& slot : trace.slots)
        cs.pairs.push_back({slot_cost(slot, underusage_rate, kFixed), slot_cost(slot, underusage_rate, kVariable)});
    return cs;
}

/// Same as cost_series but with H_t = fraction * p0_t for every slot.
inline CostSeries cost_series_relative(const Trace& trace, double fraction_of_fixed_rate) {
    if (trace.slots.empty()) throw ValidationError("trace is empty");
    detail::require_finite_nonneg(fraction_of_fixed_rate, "underusage fraction");
    CostSeries cs;
    cs.pairs.reserve(trace.size());
    for (const auto& slot : trace.slots) {
        const double h = fraction_of_fixed_rate * slot.fixed_rate;
        cs.pairs.push_back({slot_cost(slot, h, kFixed), slot_cost(slot, h, kVariable)});
    }
    return cs;
}

/// Constant-fee objective: sum of g_t(s_t) + beta * (s_t - s_{t-1})^+ with s_0 = 0.
inline double sp_cost(const Schedule& sched, const CostSeries& cs, double beta) {
    detail::require_same_length(sched.size(), cs.size());
    detail::validate_schedule(sched);
    if (!(beta >= 0.0)) throw ValidationError("beta must be >= 0");
    double total = 0.0;
    State prev = kFixed;
    for (std::size_t t = 0; t < sched.size(); ++t) {
        const State s = sched[t];
        total += cs[t].at(s);
        if (s > prev) total += beta;
        prev = s;
    }
    return total;
}

/// Symmetric-movement objective over T+1 slots, half the fee per move, s_0 = s_{T+1} = 0.
inline double p2_cost(const Schedule& sched, const CostSeries& cs, double beta) {
    detail::require_same_length(sched.size(), cs.size());
    detail::validate_schedule(sched);
    if (!(beta >= 0.0)) throw ValidationError("beta must be >= 0");
    const double half = beta / 2.0;
    double total = 0.0;
    State prev = kFixed;
    for (std::size_t t = 0; t < sched.size(); ++t) {
        const State s = sched[t];
        total += cs[t].at(s);
        if (s != prev) total += half;
        prev = s;
    }
    // slot T+1: g_{T+1}(0) = 0, only the closing move can cost anything
    if (prev != kFixed) total += half;
    return total;
}

/// Maximal runs of state 0 inside [1, T]; the boundary slot 0 is never part of a run.
inline std::vector<ZeroRun> zero_runs(const Schedule& sched) {
    detail::validate_schedule(sched);
    std::vector<ZeroRun> runs;
    std::size_t t = 0;
    while (t < sched.size()) {
        if (sched[t] != kFixed) {
            ++t;
            continue;
        }
        const std::size_t start = t;
        while (t < sched.size() && sched[t] == kFixed) ++t;
        runs.push_back({start + 1, t});
    }
    return runs;
}

/// Decreasing-fee objective: sum of g_t(s_t) plus alpha * (L - d) for each zero-run of length d.
///
/// In literal mode every run is charged, including one that reaches the horizon; in
/// transition-only mode only runs that are followed by a 1 within the horizon pay.
inline double dsp_cost(const Schedule& sched, const CostSeries& cs, double alpha, int contract_len,
                       FeeMode mode = FeeMode::literal) {
    detail::require_same_length(sched.size(), cs.size());
    if (!(alpha >= 0.0)) throw ValidationError("alpha must be >= 0");
    if (contract_len < 1) throw ValidationError("contract length must be >= 1");
    const auto len = static_cast<std::size_t>(contract_len);
    const auto runs = zero_runs(sched);
    double total = 0.0;
    for (std::size_t t = 0; t < sched.size(); ++t) total += cs[t].at(sched[t]);
    for (const auto& run : runs) {
        if (run.length() > len)
            throw InfeasibleError("zero-run [" + std::to_string(run.start) + ", " + std::to_string(run.end) +
                                  "] exceeds contract length " + std::to_string(contract_len));
        const bool cancelled = run.end < sched.size();
        if (mode == FeeMode::literal || cancelled)
            total += alpha * static_cast<double>(len - run.length());
    }
    return total;
}

inline bool dsp_feasible(const Schedule& sched, int contract_len) {
    const auto runs = zero_runs(sched);
    return std::none_of(runs.begin(), runs.end(),
                        [&](const ZeroRun& r) { return r.length() > static_cast<std::size_t>(contract_len); });
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        out.push_back(trim(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos)));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

template <class T>
bool parse_number(std::string_view field, T& out) {
    if (field.empty()) return false;
    if (field.front() == '+') field.remove_prefix(1);
    const auto* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, out);
    return ec == std::errc{} && ptr == end;
}

} // namespace detail

/// Parses a trace CSV with header `t,e,p0,p1,B`. Row numbers in errors count the header as row 1.
inline Trace parse_trace(std::string_view csv) {
    if (csv.size() >= 3 && csv.substr(0, 3) == "\xEF\xBB\xBF") csv.remove_prefix(3);
    Trace trace;
    std::size_t row = 0;
    bool header_seen = false;
    long long expected_t = 1;
    std::size_t pos = 0;
    while (pos <= csv.size()) {
        const auto nl = csv.find('\n', pos);
        const auto raw = csv.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = (nl == std::string_view::npos) ? csv.size() + 1 : nl + 1;
        ++row;
        const auto line = detail::trim(raw);
        if (line.empty()) continue;
        const auto fields = detail::split_commas(line);
        if (!header_seen) {
            static constexpr std::string_view expected[] = {"t", "e", "p0", "p1", "B"};
            if (fields.size() != 5 || !std::equal(fields.begin(), fields.end(), std::begin(expected)))
                throw ParseError(row, "expected header t,e,p0,p1,B");
            header_seen = true;
            continue;
        }
        if (fields.size() != 5)
            throw ParseError(row, "expected 5 columns, found " + std::to_string(fields.size()));
        long long t = 0;
        if (!detail::parse_number(fields[0], t)) throw ParseError(row, "slot index is not an integer");
        if (t != expected_t)
            throw ParseError(row, "slot index " + std::to_string(t) + " out of sequence, expected " +
                                      std::to_string(expected_t));
        ++expected_t;
        double v[4];
        static constexpr const char* names[] = {"e", "p0", "p1", "B"};
        for (int k = 0; k < 4; ++k) {
            if (!detail::parse_number(fields[k + 1], v[k]))
                throw ParseError(row, std::string("column ") + names[k] + " is not a number");
            if (!std::isfinite(v[k])) throw ParseError(row, std::string("column ") + names[k] + " is not finite");
            if (v[k] < 0.0) throw ParseError(row, std::string("column ") + names[k] + " is negative");
        }
        trace.slots.push_back({v[0], v[1], v[2], v[3]});
    }
    if (!header_seen) throw ParseError(1, "missing header");
    if (trace.slots.empty()) throw ParseError(row, "trace has no rows");
    return trace;
}

/// Writes a trace in the format read by parse_trace, with LF line endings.
inline std::string format_trace(const Trace& trace, int precision = 6) {
    std::string out = "t,e,p0,p1,B\n";
    char buf[256];
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const auto& s = trace.slots[i];
        std::snprintf(buf, sizeof buf, "%zu,%.*f,%.*f,%.*f,%.*f\n", i + 1, precision, s.demand_kwh, precision,
                      s.fixed_rate, precision, s.variable_rate, precision, s.base_load_kwh);
        out += buf;
    }
    return out;
}

} // namespace planswitch
