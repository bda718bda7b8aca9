#pragma once

// Experiment harness: synthetic traces, algorithm comparison against a stay-put benchmark,
// and cancellation-fee sweeps. Reports are plain structs with JSON/CSV writers.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <exception>
#include <mutex>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "planswitch/adversary.hpp"
#include "planswitch/chase.hpp"
#include "planswitch/cost_model.hpp"
#include "planswitch/error.hpp"
#include "planswitch/oracles.hpp"

namespace planswitch {

enum class FeeRegime { constant, linear };
enum class Algorithm { ofa, dp, gchase, gchase_r, cchase };
enum class Benchmark { all_variable, all_fixed };
enum class SynthProfile { seasonal, flat };

inline std::string_view to_string(FeeRegime r) { return r == FeeRegime::constant ? "constant" : "linear"; }
inline std::string_view to_string(Benchmark b) { return b == Benchmark::all_variable ? "all-variable" : "all-fixed"; }
inline std::string_view to_string(FeeMode m) { return m == FeeMode::literal ? "literal" : "transition-only"; }
inline std::string_view to_string(SynthProfile p) { return p == SynthProfile::seasonal ? "seasonal" : "flat"; }

inline std::string_view to_string(Algorithm a) {
    switch (a) {
    case Algorithm::ofa: return "ofa";
    case Algorithm::dp: return "dp";
    case Algorithm::gchase: return "gchase";
    case Algorithm::gchase_r: return "gchase_r";
    case Algorithm::cchase: return "cchase";
    }
    return "?";
}

inline Algorithm parse_algorithm(std::string_view name) {
    for (auto a : {Algorithm::ofa, Algorithm::dp, Algorithm::gchase, Algorithm::gchase_r, Algorithm::cchase})
        if (to_string(a) == name) return a;
    throw ValidationError("unknown algorithm '" + std::string(name) + "'");
}

inline std::vector<Algorithm> parse_algorithm_list(std::string_view list) {
    std::vector<Algorithm> out;
    std::size_t pos = 0;
    while (pos <= list.size()) {
        const auto comma = list.find(',', pos);
        const auto item = detail::trim(list.substr(pos, comma == std::string_view::npos ? std::string_view::npos
                                                                                          : comma - pos));
        if (!item.empty()) {
            const auto a = parse_algorithm(item);
            if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
        }
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

inline SynthProfile parse_profile(std::string_view name) {
    if (name == "seasonal") return SynthProfile::seasonal;
    if (name == "flat") return SynthProfile::flat;
    throw ValidationError("unknown synthesis profile '" + std::string(name) + "'");
}

/// Monthly average demand the generator is calibrated to (kWh).
inline constexpr double kMeanMonthlyDemand = 765.0;

/// Seeded synthetic trace.
///
/// Demand is 765 kWh scaled by a 12-month sinusoid (amplitude 25%, seasonal profile only) and
/// mean-one lognormal noise (sigma 0.2). The fixed rate moves in [0.100, 0.110] $/kWh, the
/// variable rate follows a phase-shifted seasonal swing around 0.115 $/kWh (amplitude 0.03,
/// noise sd 0.008, floored at 0.02). The base load of a slot is the previous slot's demand.
/// Values are rounded to six decimals so the trace survives a CSV round trip unchanged.
inline Trace synth_trace(std::size_t horizon, std::uint64_t seed, SynthProfile profile = SynthProfile::seasonal) {
    if (horizon < 1) throw ValidationError("synthetic trace needs T >= 1");
    std::mt19937_64 rng(seed);
    auto normal = [&] {
        // Box-Muller on our own uniform draws keeps the stream identical across standard libraries
        const double u1 = 1.0 - unit_draw(rng);
        const double u2 = unit_draw(rng);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    };
    const double amplitude = profile == SynthProfile::seasonal ? 0.25 : 0.0;
    auto seasonal = [&](double t) { return 1.0 + amplitude * std::sin(2.0 * std::numbers::pi * t / 12.0); };

    constexpr double sigma = 0.2;
    Trace raw;
    raw.slots.reserve(horizon);
    double previous = kMeanMonthlyDemand * seasonal(-1.0);
    for (std::size_t i = 0; i < horizon; ++i) {
        const double t = static_cast<double>(i);
        const double demand = kMeanMonthlyDemand * seasonal(t) * std::exp(sigma * normal() - 0.5 * sigma * sigma);
        const double phase = 2.0 * std::numbers::pi * t / 12.0;
        const double fixed = 0.105 + 0.005 * std::sin(phase + 1.0);
        const double variable = std::max(0.02, 0.115 + 0.03 * std::sin(phase - 0.5 * std::numbers::pi) + 0.008 * normal());
        raw.slots.push_back({demand, fixed, variable, previous});
        previous = demand;
    }
    return parse_trace(format_trace(raw, 6));
}

struct RunConfig {
    std::string trace_source = "synthetic";
    double underusage_fraction = 0.1;         // H_t = fraction * p0_t unless an absolute H is set
    std::optional<double> underusage_rate;    // absolute H
    double beta = 100.0;
    double alpha = 10.0;
    int contract_len = 12;
    FeeRegime regime = FeeRegime::constant;
    FeeMode fee_mode = FeeMode::literal;
    std::vector<Algorithm> algorithms{Algorithm::ofa, Algorithm::gchase, Algorithm::gchase_r};
    std::size_t mc_runs = 100;
    std::uint64_t seed = 1;
    Benchmark benchmark = Benchmark::all_variable;

    /// Cancellation fee used by the Delta recurrence: beta, or alpha * L in the linear regime.
    double effective_beta() const { return regime == FeeRegime::constant ? beta : alpha * contract_len; }

    void validate() const {
        if (algorithms.empty()) throw ValidationError("select at least one algorithm");
        if (mc_runs < 1) throw ValidationError("monte-carlo runs must be >= 1");
        if (contract_len < 1) throw ValidationError("contract length must be >= 1");
        if (!(std::isfinite(underusage_fraction) && underusage_fraction >= 0.0))
            throw ValidationError("underusage fraction must be finite and >= 0");
        if (underusage_rate && !(std::isfinite(*underusage_rate) && *underusage_rate >= 0.0))
            throw ValidationError("underusage rate must be finite and >= 0");
        if (regime == FeeRegime::constant) {
            if (!(std::isfinite(beta) && beta > 0.0)) throw ValidationError("beta must be finite and > 0");
        } else {
            if (!(std::isfinite(alpha) && alpha > 0.0)) throw ValidationError("alpha must be finite and > 0");
        }
        for (auto a : algorithms) {
            if (regime == FeeRegime::linear && a == Algorithm::ofa)
                throw ValidationError("ofa is not optimal for the linear fee regime; use dp");
            if (regime == FeeRegime::linear && a == Algorithm::cchase)
                throw ValidationError("cchase has no linear-regime objective");
        }
    }
};

struct AlgorithmResult {
    Algorithm algorithm = Algorithm::ofa;
    double cost = 0.0; // mean over replications for gchase_r
    std::optional<double> savings_pct;
    std::optional<double> ratio_vs_offline;
    std::optional<Schedule> schedule;
    std::optional<FractionalSchedule> fractional;
    std::optional<double> stderr_of_mean;
    std::size_t replications = 0;
    std::size_t forced_switches = 0;
};

struct SavingsReport {
    RunConfig config;
    std::size_t horizon = 0;
    double benchmark_cost = 0.0;
    double offline_cost = 0.0;
    std::vector<AlgorithmResult> results;
    // Orderings guaranteed for the constant regime; empty in the linear regime.
    std::optional<bool> offline_is_minimum;
    std::optional<bool> gchase_within_3;
    std::optional<bool> gchase_r_within_2;
};

inline CostSeries config_costs(const RunConfig& cfg, const Trace& trace) {
    return cfg.underusage_rate ? cost_series(trace, *cfg.underusage_rate)
                               : cost_series_relative(trace, cfg.underusage_fraction);
}

/// Cost of never switching plan, under the same objective as the algorithms.
///
/// All-variable leaves s_0 = 0 once, so the constant regime charges one fee. All-fixed in the
/// linear regime renews the contract every L months; in literal fee mode an unfinished final
/// contract pays for its remaining months.
inline double benchmark_cost(const RunConfig& cfg, const CostSeries& cs) {
    const std::size_t horizon = cs.size();
    if (cfg.benchmark == Benchmark::all_variable) {
        const Schedule ones(std::vector<State>(horizon, kVariable));
        return cfg.regime == FeeRegime::constant ? sp_cost(ones, cs, cfg.beta)
                                                 : dsp_cost(ones, cs, cfg.alpha, cfg.contract_len, cfg.fee_mode);
    }
    double total = 0.0;
    for (const auto& p : cs.pairs) total += p.g0;
    if (cfg.regime == FeeRegime::linear && cfg.fee_mode == FeeMode::literal) {
        const auto cap = static_cast<std::size_t>(cfg.contract_len);
        const std::size_t tail = horizon % cap;
        if (tail != 0) total += cfg.alpha * static_cast<double>(cap - tail);
    }
    return total;
}

inline std::optional<double> savings_percent(double benchmark, double cost) {
    if (!(benchmark > 0.0)) return std::nullopt;
    return 100.0 * (benchmark - cost) / benchmark;
}

inline SavingsReport run_report(const RunConfig& cfg, const Trace& trace) {
    cfg.validate();
    const auto cs = config_costs(cfg, trace);
    const bool constant = cfg.regime == FeeRegime::constant;
    const double beta = cfg.effective_beta();
    const auto dt = constant ? delta_trace(cs, beta) : drift_delta_trace(cs, cfg.alpha, cfg.contract_len);

    auto objective = [&](const Schedule& s) {
        return constant ? sp_cost(s, cs, beta) : dsp_cost(s, cs, cfg.alpha, cfg.contract_len, cfg.fee_mode);
    };

    SavingsReport report;
    report.config = cfg;
    report.horizon = cs.size();
    report.benchmark_cost = benchmark_cost(cfg, cs);
    report.offline_cost = constant ? sp_cost(ofa_s(dt), cs, beta)
                                   : dp_dsp(cs, cfg.alpha, cfg.contract_len, cfg.fee_mode).best_cost;

    for (auto alg : cfg.algorithms) {
        AlgorithmResult r;
        r.algorithm = alg;
        switch (alg) {
        case Algorithm::ofa:
            r.schedule = ofa_s(dt);
            r.cost = objective(*r.schedule);
            break;
        case Algorithm::dp:
            r.schedule = constant ? dp_sp(cs, beta).best_schedule
                                  : dp_dsp(cs, cfg.alpha, cfg.contract_len, cfg.fee_mode).best_schedule;
            r.cost = objective(*r.schedule);
            break;
        case Algorithm::gchase:
            if (constant) {
                r.schedule = gchase_s(dt);
            } else {
                auto capped = gchase_s_capped(dt, cfg.contract_len);
                r.schedule = std::move(capped.schedule);
                r.forced_switches = capped.forced_switches;
            }
            r.cost = objective(*r.schedule);
            break;
        case Algorithm::gchase_r: {
            double mean = 0.0, m2 = 0.0;
            for (std::size_t i = 0; i < cfg.mc_runs; ++i) {
                std::mt19937_64 rng(cfg.seed + i);
                double c = 0.0;
                if (constant) {
                    c = objective(gchase_r(dt, rng));
                } else {
                    auto capped = gchase_r_capped(dt, cfg.contract_len, rng);
                    r.forced_switches += capped.forced_switches;
                    c = objective(capped.schedule);
                }
                const double d = c - mean;
                mean += d / static_cast<double>(i + 1);
                m2 += d * (c - mean);
            }
            r.cost = mean;
            r.replications = cfg.mc_runs;
            if (cfg.mc_runs >= 2)
                r.stderr_of_mean = std::sqrt(m2 / static_cast<double>(cfg.mc_runs - 1) / static_cast<double>(cfg.mc_runs));
            break;
        }
        case Algorithm::cchase:
            r.fractional = cchase(dt);
            r.cost = csp_cost(*r.fractional, cs, beta);
            break;
        }
        r.savings_pct = savings_percent(report.benchmark_cost, r.cost);
        if (report.offline_cost > 0.0) r.ratio_vs_offline = r.cost / report.offline_cost;
        report.results.push_back(std::move(r));
    }

    if (constant) {
        const double tol = 1e-9 * std::max(1.0, std::abs(report.offline_cost));
        bool minimum = report.offline_cost <= report.benchmark_cost + tol;
        for (const auto& r : report.results)
            if (r.schedule) minimum = minimum && report.offline_cost <= r.cost + tol;
        report.offline_is_minimum = minimum;
        for (const auto& r : report.results) {
            if (r.algorithm == Algorithm::gchase) report.gchase_within_3 = r.cost <= 3.0 * report.offline_cost + tol;
            if (r.algorithm == Algorithm::gchase_r)
                report.gchase_r_within_2 = r.cost <= 2.0 * report.offline_cost + 3.0 * r.stderr_of_mean.value_or(0.0) + tol;
        }
    }
    return report;
}

inline nlohmann::ordered_json config_json(const RunConfig& cfg) {
    nlohmann::ordered_json j;
    j["trace"] = cfg.trace_source;
    j["fee_regime"] = to_string(cfg.regime);
    j["beta"] = cfg.effective_beta();
    j["alpha"] = cfg.regime == FeeRegime::linear ? nlohmann::ordered_json(cfg.alpha) : nlohmann::ordered_json();
    j["contract_len"] = cfg.contract_len;
    j["fee_mode"] = to_string(cfg.fee_mode);
    if (cfg.underusage_rate)
        j["underusage"] = {{"kind", "absolute"}, {"value", *cfg.underusage_rate}};
    else
        j["underusage"] = {{"kind", "fraction_of_fixed_rate"}, {"value", cfg.underusage_fraction}};
    j["benchmark"] = to_string(cfg.benchmark);
    auto algs = nlohmann::ordered_json::array();
    for (auto a : cfg.algorithms) algs.push_back(to_string(a));
    j["algorithms"] = algs;
    j["mc_runs"] = cfg.mc_runs;
    j["seed"] = cfg.seed;
    return j;
}

inline nlohmann::ordered_json to_json(const SavingsReport& report) {
    using json = nlohmann::ordered_json;
    auto opt = [](const auto& v) { return v ? json(*v) : json(); };
    json j;
    j["config"] = config_json(report.config);
    j["horizon"] = report.horizon;
    j["benchmark"] = {{"plan", to_string(report.config.benchmark)}, {"cost", report.benchmark_cost}};
    j["offline_optimum"] = report.offline_cost;
    json algs = json::array();
    for (const auto& r : report.results) {
        json a;
        a["name"] = to_string(r.algorithm);
        a["cost"] = r.cost;
        a["savings_pct"] = opt(r.savings_pct);
        a["ratio_vs_offline"] = opt(r.ratio_vs_offline);
        if (r.schedule) {
            json s = json::array();
            for (State v : r.schedule->states) s.push_back(static_cast<int>(v));
            a["schedule"] = s;
        } else if (r.fractional) {
            a["schedule"] = r.fractional->x;
        } else {
            a["schedule"] = nullptr;
        }
        if (r.algorithm == Algorithm::gchase_r) {
            a["replications"] = r.replications;
            a["stderr"] = opt(r.stderr_of_mean);
        }
        if (report.config.regime == FeeRegime::linear &&
            (r.algorithm == Algorithm::gchase || r.algorithm == Algorithm::gchase_r))
            a["forced_switches"] = r.forced_switches;
        algs.push_back(std::move(a));
    }
    j["algorithms"] = std::move(algs);
    j["checks"] = {{"offline_is_minimum", opt(report.offline_is_minimum)},
                   {"gchase_within_3x", opt(report.gchase_within_3)},
                   {"gchase_r_within_2x", opt(report.gchase_r_within_2)}};
    return j;
}

struct SweepRow {
    double fee = 0.0; // beta of the row; alpha = fee / L in the linear regime
    double offline_cost = 0.0;
    double benchmark_cost = 0.0;
    std::vector<std::optional<double>> savings_pct; // one per configured algorithm
};

struct SweepResult {
    RunConfig config;
    std::vector<SweepRow> rows;
    std::vector<std::string> monitor; // observations that are logged, not asserted
};

inline std::vector<double> fee_grid(double from, double to, double step) {
    if (!std::isfinite(from) || !std::isfinite(to) || !std::isfinite(step))
        throw ValidationError("sweep bounds must be finite");
    if (!(from > 0.0)) throw ValidationError("sweep must start above zero");
    if (from > to) throw ValidationError("sweep start exceeds end");
    if (!(step > 0.0)) throw ValidationError("sweep step must be > 0");
    const auto n = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9)) + 1;
    std::vector<double> fees(n);
    for (std::size_t i = 0; i < n; ++i) fees[i] = from + static_cast<double>(i) * step;
    return fees;
}

/// Re-runs the comparison for each fee on one trace. In the linear regime alpha = fee / L.
/// Points are evaluated on worker threads and collected in fee order.
inline SweepResult sweep(const RunConfig& base, const Trace& trace, double from, double to, double step,
                         unsigned workers = std::max(1u, std::thread::hardware_concurrency())) {
    const auto fees = fee_grid(from, to, step);
    base.validate();
    std::vector<std::optional<SavingsReport>> reports(fees.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (std::size_t i = next++; i < fees.size(); i = next++) {
            try {
                RunConfig cfg = base;
                if (cfg.regime == FeeRegime::constant)
                    cfg.beta = fees[i];
                else
                    cfg.alpha = fees[i] / cfg.contract_len;
                reports[i] = run_report(cfg, trace);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        const auto n = std::min<std::size_t>(workers, fees.size());
        for (std::size_t w = 1; w < n; ++w) pool.emplace_back(work);
        work();
    }
    if (failure) std::rethrow_exception(failure);

    SweepResult out;
    out.config = base;
    std::optional<double> prev_offline;
    std::optional<double> prev_savings;
    std::size_t cost_drops = 0, savings_rises = 0;
    double first_drop = 0.0, first_rise = 0.0;
    for (std::size_t i = 0; i < fees.size(); ++i) {
        const double fee = fees[i];
        const auto& report = *reports[i];
        SweepRow row{fee, report.offline_cost, report.benchmark_cost, {}};
        for (const auto& r : report.results) row.savings_pct.push_back(r.savings_pct);

        const double tol = 1e-9 * std::max(1.0, std::abs(report.offline_cost));
        if (prev_offline && report.offline_cost < *prev_offline - tol && cost_drops++ == 0) first_drop = fee;
        const auto offline_savings = savings_percent(report.benchmark_cost, report.offline_cost);
        if (prev_savings && offline_savings && *offline_savings > *prev_savings + 1e-9 && savings_rises++ == 0)
            first_rise = fee;
        prev_offline = report.offline_cost;
        prev_savings = offline_savings;
        out.rows.push_back(std::move(row));
    }
    const std::size_t steps = fees.size() - 1;
    if (cost_drops > 0) {
        std::ostringstream msg;
        msg << "offline cost decreased at " << cost_drops << " of " << steps << " steps (first at fee " << first_drop << ")";
        out.monitor.push_back(msg.str());
    }
    if (savings_rises > 0) {
        // expected whenever the benchmark itself pays a fee that grows with beta
        std::ostringstream msg;
        msg << "offline savings rose at " << savings_rises << " of " << steps << " steps (first at fee " << first_rise << ")";
        out.monitor.push_back(msg.str());
    }
    return out;
}

inline std::string to_csv(const SweepResult& result) {
    const auto& cfg = result.config;
    std::ostringstream os;
    os.precision(17);
    os << "# config " << config_json(cfg).dump() << "\n";
    os << "fee,alpha,benchmark_cost,offline_cost";
    for (auto a : cfg.algorithms) os << ',' << to_string(a) << "_savings_pct";
    os << "\n";
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.10g", v);
        return std::string(buf);
    };
    for (const auto& row : result.rows) {
        os << num(row.fee) << ',';
        if (cfg.regime == FeeRegime::linear) os << num(row.fee / cfg.contract_len);
        os << ',' << num(row.benchmark_cost) << ',' << num(row.offline_cost);
        for (const auto& s : row.savings_pct) {
            os << ',';
            if (s) os << num(*s);
        }
        os << "\n";
    }
    return os.str();
}

} // namespace planswitch
