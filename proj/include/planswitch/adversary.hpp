#pragma once

// Lower-bound instance generators and competitive-ratio measurement.

#include <cmath>
#include <concepts>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <utility>

#include "planswitch/chase.hpp"
#include "planswitch/cost_model.hpp"
#include "planswitch/error.hpp"
#include "planswitch/oracles.hpp"

namespace planswitch {

struct RatioReport {
    std::string instance_id;
    double alg_cost = 0.0;
    double opt_cost = 0.0;
    std::optional<double> ratio; // empty when opt_cost == 0

    // randomized runs only
    std::optional<double> mean;
    std::optional<double> stderr_of_mean;
    std::size_t replications = 0;

    bool defined() const noexcept { return ratio.has_value(); }
};

inline RatioReport make_ratio_report(std::string id, double alg_cost, double opt_cost) {
    RatioReport r;
    r.instance_id = std::move(id);
    r.alg_cost = alg_cost;
    r.opt_cost = opt_cost;
    if (opt_cost > 0.0) r.ratio = alg_cost / opt_cost;
    return r;
}

/// Tight instance for the fractional chaser: slot 1 = (delta*beta, 0), later slots = (0, delta*beta).
inline CostSeries randomized_lb_instance(double beta, double small_delta, std::size_t horizon = 2) {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw ValidationError("beta must be finite and > 0");
    if (!(small_delta > 0.0 && small_delta < 1.0)) throw ValidationError("delta must lie in (0, 1)");
    if (horizon < 2) throw ValidationError("horizon must be >= 2");
    CostSeries cs;
    cs.pairs.reserve(horizon);
    const double c = small_delta * beta;
    cs.pairs.push_back({c, 0.0});
    for (std::size_t t = 1; t < horizon; ++t) cs.pairs.push_back({0.0, c});
    return cs;
}

/// Offline optimum of the constant-fee problem: exhaustive search on short horizons, the
/// backward pass otherwise.
inline double sp_optimum(const CostSeries& cs, double beta) {
    if (cs.size() <= kBruteForceMaxHorizon && beta > 0.0) return brute_force_sp(cs, beta).best_cost;
    if (beta > 0.0) return sp_cost(ofa_s(delta_trace(cs, beta)), cs, beta);
    return dp_sp(cs, beta).best_cost;
}

struct AdversaryOutcome {
    CostSeries costs;
    Schedule online;
    RatioReport report;
};

/// Adaptive game against an online player: every slot charges `unit` to whichever state the
/// player occupied after the previous slot. The player sees one cost pair at a time.
template <OnlinePlayer Player>
AdversaryOutcome deterministic_adversary(Player& player, double beta, std::size_t horizon, double unit) {
    if (horizon < 1) throw ValidationError("horizon must be >= 1");
    if (!(unit > 0.0) || !std::isfinite(unit)) throw ValidationError("unit must be finite and > 0");
    if (!(beta > 0.0)) throw ValidationError("beta must be > 0");
    AdversaryOutcome out;
    out.costs.pairs.reserve(horizon);
    out.online.states.reserve(horizon);
    State current = kFixed;
    for (std::size_t t = 0; t < horizon; ++t) {
        const CostPair pair = current == kFixed ? CostPair{unit, 0.0} : CostPair{0.0, unit};
        out.costs.pairs.push_back(pair);
        current = player.observe(pair);
        out.online.states.push_back(current);
    }
    out.report = make_ratio_report("adaptive-T" + std::to_string(horizon), sp_cost(out.online, out.costs, beta),
                                   sp_optimum(out.costs, beta));
    return out;
}

/// Ratio of a constant-fee schedule against the backward-pass optimum.
inline RatioReport measure_ratio(const Schedule& schedule, const CostSeries& cs, double beta,
                                 std::string id = "instance") {
    const double opt = sp_cost(ofa_s(delta_trace(cs, beta)), cs, beta);
    return make_ratio_report(std::move(id), sp_cost(schedule, cs, beta), opt);
}

template <class Alg>
    requires std::invocable<Alg, const CostSeries&, double>
RatioReport measure_ratio(Alg&& alg, const CostSeries& cs, double beta, std::string id = "instance") {
    return measure_ratio(Schedule(std::invoke(std::forward<Alg>(alg), cs, beta)), cs, beta, std::move(id));
}

/// Ratio of a decreasing-fee schedule against the dynamic-programming optimum.
inline RatioReport measure_ratio_dsp(const Schedule& schedule, const CostSeries& cs, double alpha, int contract_len,
                                     FeeMode mode = FeeMode::literal, std::string id = "instance") {
    const double opt = dp_dsp(cs, alpha, contract_len, mode).best_cost;
    return make_ratio_report(std::move(id), dsp_cost(schedule, cs, alpha, contract_len, mode), opt);
}

struct SampleSummary {
    double mean = 0.0;
    double stderr_of_mean = 0.0;
    std::size_t n = 0;
};

/// Runs `sample(rng)` once per replication; replication i owns an engine seeded with seed + i,
/// and results are accumulated in replication order.
template <class Sampler>
    requires std::invocable<Sampler&, std::mt19937_64&>
SampleSummary replicate(Sampler&& sample, std::size_t n_runs, std::uint64_t seed) {
    if (n_runs < 2) throw ValidationError("need at least 2 replications");
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t i = 0; i < n_runs; ++i) {
        std::mt19937_64 rng(seed + i);
        const double x = static_cast<double>(sample(rng));
        const double d = x - mean;
        mean += d / static_cast<double>(i + 1);
        m2 += d * (x - mean);
    }
    const double var = m2 / static_cast<double>(n_runs - 1);
    return {mean, std::sqrt(var / static_cast<double>(n_runs)), n_runs};
}

/// Monte Carlo estimate of the randomized chaser's expected constant-fee cost.
inline RatioReport monte_carlo(const CostSeries& cs, double beta, std::size_t n_runs, std::uint64_t seed,
                               std::string id = "instance") {
    const auto dt = delta_trace(cs, beta);
    const auto summary =
        replicate([&](std::mt19937_64& rng) { return sp_cost(gchase_r(dt, rng), cs, beta); }, n_runs, seed);
    auto report = make_ratio_report(std::move(id), summary.mean, sp_cost(ofa_s(dt), cs, beta));
    report.mean = summary.mean;
    report.stderr_of_mean = summary.stderr_of_mean;
    report.replications = summary.n;
    return report;
}

} // namespace planswitch
