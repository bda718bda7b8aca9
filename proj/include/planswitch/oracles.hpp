#pragma once

// Ground-truth solvers (exhaustive search and dynamic programming) and the segment-sum
// identities used to cross-check the chasing algorithms.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "planswitch/chase.hpp"
#include "planswitch/cost_model.hpp"
#include "planswitch/error.hpp"

namespace planswitch {

/// Costs closer than this are treated as ties.
inline constexpr double kTieTolerance = 1e-9;

/// Largest horizon the exhaustive oracles accept (2^22 schedules).
inline constexpr std::size_t kBruteForceMaxHorizon = 22;

struct OracleResult {
    Schedule best_schedule;
    double best_cost = 0.0;
    std::uint64_t ties = 0;
};

namespace detail {

inline std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
    const std::uint64_t s = a + b;
    return s < a ? std::numeric_limits<std::uint64_t>::max() : s;
}

inline Schedule schedule_from_mask(std::uint64_t mask, std::size_t horizon) {
    std::vector<State> s(horizon);
    for (std::size_t t = 0; t < horizon; ++t) s[t] = static_cast<State>((mask >> (horizon - 1 - t)) & 1u);
    return Schedule(std::move(s));
}

inline void guard_horizon(std::size_t horizon) {
    if (horizon == 0) throw ValidationError("cost series is empty");
    if (horizon > kBruteForceMaxHorizon)
        throw RefusalError("exhaustive search refused for T = " + std::to_string(horizon) + " (limit " +
                           std::to_string(kBruteForceMaxHorizon) + ")");
}

// Enumerates masks in increasing order, which is lexicographic order of schedules, so the
// first minimum met is the lexicographically smallest one.
template <class Objective>
OracleResult enumerate(std::size_t horizon, Objective&& objective) {
    guard_horizon(horizon);
    const std::uint64_t count = std::uint64_t{1} << horizon;
    double best = std::numeric_limits<double>::infinity();
    std::uint64_t best_mask = 0;
    std::uint64_t ties = 0;
    for (std::uint64_t mask = 0; mask < count; ++mask) {
        const double c = objective(mask);
        if (!std::isfinite(c)) continue; // infeasible
        if (c < best - kTieTolerance) {
            best = c;
            best_mask = mask;
            ties = 1;
        } else if (std::abs(c - best) <= kTieTolerance) {
            ++ties;
        }
    }
    if (ties == 0) throw InvariantViolation("no feasible schedule");
    return {schedule_from_mask(best_mask, horizon), best, ties};
}

} // namespace detail

inline OracleResult brute_force_sp(const CostSeries& cs, double beta) {
    if (!(beta >= 0.0)) throw ValidationError("beta must be >= 0");
    const std::size_t horizon = cs.size();
    auto result = detail::enumerate(horizon, [&](std::uint64_t mask) {
        double total = 0.0;
        unsigned prev = 0;
        for (std::size_t t = 0; t < horizon; ++t) {
            const unsigned s = (mask >> (horizon - 1 - t)) & 1u;
            total += s ? cs[t].g1 : cs[t].g0;
            if (s > prev) total += beta;
            prev = s;
        }
        return total;
    });
    result.best_cost = sp_cost(result.best_schedule, cs, beta);
    return result;
}

inline OracleResult brute_force_dsp(const CostSeries& cs, double alpha, int contract_len,
                                    FeeMode mode = FeeMode::literal) {
    if (!(alpha >= 0.0)) throw ValidationError("alpha must be >= 0");
    if (contract_len < 1) throw ValidationError("contract length must be >= 1");
    const std::size_t horizon = cs.size();
    const auto cap = static_cast<std::size_t>(contract_len);
    auto result = detail::enumerate(horizon, [&](std::uint64_t mask) {
        double total = 0.0;
        std::size_t run = 0;
        for (std::size_t t = 0; t < horizon; ++t) {
            const unsigned s = (mask >> (horizon - 1 - t)) & 1u;
            if (s == 0) {
                total += cs[t].g0;
                if (++run > cap) return std::numeric_limits<double>::infinity();
            } else {
                total += cs[t].g1;
                if (run > 0) total += alpha * static_cast<double>(cap - run);
                run = 0;
            }
        }
        if (run > 0 && mode == FeeMode::literal) total += alpha * static_cast<double>(cap - run);
        return total;
    });
    result.best_cost = dsp_cost(result.best_schedule, cs, alpha, contract_len, mode);
    return result;
}

/// Exact optimum of the decreasing-fee problem in O(T * L).
///
/// The context before slot t is r, the length of the zero-run in progress (0 when the
/// previous slot is 1 or t is the first slot). Ending a run of length r charges alpha*(L - r).
/// Reconstruction prefers state 0 among optimal moves, giving the lexicographically smallest
/// optimal schedule.
inline OracleResult dp_dsp(const CostSeries& cs, double alpha, int contract_len, FeeMode mode = FeeMode::literal) {
    if (cs.size() == 0) throw ValidationError("cost series is empty");
    if (!(alpha >= 0.0)) throw ValidationError("alpha must be >= 0");
    if (contract_len < 1) throw ValidationError("contract length must be >= 1");
    const std::size_t horizon = cs.size();
    const auto cap = static_cast<std::size_t>(contract_len);
    const std::size_t width = cap + 1;
    constexpr double inf = std::numeric_limits<double>::infinity();

    auto fee = [&](std::size_t r) { return r > 0 ? alpha * static_cast<double>(cap - r) : 0.0; };

    // value[t * width + r]: optimal cost of slots t..T-1 given context r
    std::vector<double> value((horizon + 1) * width, inf);
    std::vector<std::uint64_t> count((horizon + 1) * width, 0);
    for (std::size_t r = 0; r <= cap; ++r) {
        value[horizon * width + r] = mode == FeeMode::literal ? fee(r) : 0.0;
        count[horizon * width + r] = 1;
    }
    for (std::size_t t = horizon; t-- > 0;) {
        for (std::size_t r = 0; r <= cap; ++r) {
            const double stay = r < cap ? cs[t].g0 + value[(t + 1) * width + r + 1] : inf;
            const double leave = cs[t].g1 + fee(r) + value[(t + 1) * width];
            const double best = std::min(stay, leave);
            std::uint64_t n = 0;
            if (std::isfinite(stay) && stay <= best + kTieTolerance) n = count[(t + 1) * width + r + 1];
            if (leave <= best + kTieTolerance) n = detail::saturating_add(n, count[(t + 1) * width]);
            value[t * width + r] = best;
            count[t * width + r] = n;
        }
    }

    std::vector<State> s(horizon);
    std::size_t r = 0;
    for (std::size_t t = 0; t < horizon; ++t) {
        const double target = value[t * width + r];
        const double stay = r < cap ? cs[t].g0 + value[(t + 1) * width + r + 1] : inf;
        if (std::isfinite(stay) && stay <= target + kTieTolerance) {
            s[t] = kFixed;
            ++r;
        } else {
            s[t] = kVariable;
            r = 0;
        }
    }
    OracleResult out{Schedule(std::move(s)), 0.0, count[0]};
    out.best_cost = dsp_cost(out.best_schedule, cs, alpha, contract_len, mode);
    return out;
}

/// Two-state dynamic program for the constant-fee problem. Same tie rules as dp_dsp.
inline OracleResult dp_sp(const CostSeries& cs, double beta) {
    if (cs.size() == 0) throw ValidationError("cost series is empty");
    if (!(beta >= 0.0)) throw ValidationError("beta must be >= 0");
    const std::size_t horizon = cs.size();
    // value[t][p]: optimal cost of slots t..T-1 when slot t-1 was in state p
    std::vector<std::array<double, 2>> value(horizon + 1, {0.0, 0.0});
    std::vector<std::array<std::uint64_t, 2>> count(horizon + 1, {1, 1});
    for (std::size_t t = horizon; t-- > 0;) {
        for (State p : {kFixed, kVariable}) {
            const double to0 = cs[t].g0 + value[t + 1][0];
            const double to1 = cs[t].g1 + (p == kFixed ? beta : 0.0) + value[t + 1][1];
            const double best = std::min(to0, to1);
            std::uint64_t n = 0;
            if (to0 <= best + kTieTolerance) n = count[t + 1][0];
            if (to1 <= best + kTieTolerance) n = detail::saturating_add(n, count[t + 1][1]);
            value[t][p] = best;
            count[t][p] = n;
        }
    }
    std::vector<State> s(horizon);
    State p = kFixed;
    for (std::size_t t = 0; t < horizon; ++t) {
        const double to0 = cs[t].g0 + value[t + 1][0];
        p = to0 <= value[t][p] + kTieTolerance ? kFixed : kVariable;
        s[t] = p;
    }
    OracleResult out{Schedule(std::move(s)), 0.0, count[0][0]};
    out.best_cost = sp_cost(out.best_schedule, cs, beta);
    return out;
}

struct IdentitySides {
    double lhs = 0.0;
    double rhs = 0.0;
};

namespace detail {

// Extended difference sequence d[0..T+1]: d[0] = d[T+1] = 0, d[t] = delta(t) otherwise.
// prefix[t] = sum of (d[tau] - shift) for tau in [0, t).
inline std::vector<double> shifted_prefix(const CostSeries& cs, double shift) {
    const std::size_t horizon = cs.size();
    std::vector<double> prefix(horizon + 3, 0.0);
    for (std::size_t tau = 0; tau <= horizon + 1; ++tau) {
        const double d = (tau == 0 || tau == horizon + 1) ? 0.0 : cs[tau - 1].g0 - cs[tau - 1].g1;
        prefix[tau + 1] = prefix[tau] + (d - shift);
    }
    return prefix;
}

inline double sum_variable(const CostSeries& cs) {
    double total = 0.0;
    for (const auto& p : cs.pairs) total += p.g1;
    return total;
}

} // namespace detail

/// Constant-fee cost written as a sum over zero segments.
///
/// Segments are taken on the extended slot range [0, T+1] with s_0 = s_{T+1} = 0, so there are
/// n + 1 of them when the schedule has n runs of ones. With phi(t) = sum_{tau < t} d[tau], a
/// segment [a, b] contributes phi(b + 1) - phi(a), and
///   cost = sum_t g_t(1) - beta + sum_segments (phi(b + 1) - phi(a) + beta).
inline IdentitySides phi_identity_sp(const Schedule& sched, const CostSeries& cs, double beta) {
    IdentitySides sides;
    sides.lhs = sp_cost(sched, cs, beta);
    const auto phi = detail::shifted_prefix(cs, 0.0);
    const std::size_t horizon = cs.size();
    double rhs = detail::sum_variable(cs) - beta;
    std::size_t t = 0;
    auto state_at = [&](std::size_t k) { return (k == 0 || k == horizon + 1) ? kFixed : sched[k - 1]; };
    while (t <= horizon + 1) {
        if (state_at(t) != kFixed) {
            ++t;
            continue;
        }
        const std::size_t a = t;
        while (t <= horizon + 1 && state_at(t) == kFixed) ++t;
        const std::size_t b = t - 1;
        rhs += phi[b + 1] - phi[a] + beta;
    }
    sides.rhs = rhs;
    return sides;
}

/// Decreasing-fee cost (literal fee mode) as a sum over zero-runs inside [1, T].
///
/// With Phi(t) = sum_{tau < t} (d[tau] - alpha) and beta = alpha * L, each run [a, b]
/// contributes Phi(b + 1) - Phi(a) + beta, so
///   cost = sum_t g_t(1) + sum_runs (Phi(b + 1) - Phi(a) + beta).
inline IdentitySides phi_identity_dsp(const Schedule& sched, const CostSeries& cs, double alpha, int contract_len) {
    IdentitySides sides;
    sides.lhs = dsp_cost(sched, cs, alpha, contract_len, FeeMode::literal);
    const double beta = alpha * contract_len;
    const auto big_phi = detail::shifted_prefix(cs, alpha);
    double rhs = detail::sum_variable(cs);
    for (const auto& run : zero_runs(sched)) rhs += big_phi[run.end + 1] - big_phi[run.start] + beta;
    sides.rhs = rhs;
    return sides;
}

inline FractionalSchedule as_fractional(const Schedule& s) {
    FractionalSchedule fs;
    fs.x.assign(s.states.begin(), s.states.end());
    return fs;
}

/// Potential of the 2-competitive argument: beta * (x^2 / 2 + 2z - 2zx).
inline double chase_potential(double x, double z, double beta) noexcept {
    return beta * (0.5 * x * x + 2.0 * z - 2.0 * z * x);
}

/// Per-slot slack of the amortized inequality
///   f_t(x_t) + beta (x_t - x_{t-1})^+ + Phi_t - Phi_{t-1} <= 2 (f_t(z_t) + beta (z_t - z_{t-1})^+)
/// with f_t = g_t - min(g_t(0), g_t(1)). Entry t is RHS - LHS. Individual entries can be
/// negative when both players move in one slot; prefix sums cannot.
inline std::vector<double> potential_check(const FractionalSchedule& xs, const FractionalSchedule& zs,
                                           const CostSeries& cs, double beta) {
    detail::require_same_length(xs.size(), cs.size());
    detail::require_same_length(zs.size(), cs.size());
    std::vector<double> slack;
    slack.reserve(cs.size());
    double x_prev = 0.0;
    double z_prev = 0.0;
    for (std::size_t t = 0; t < cs.size(); ++t) {
        const double floor = std::min(cs[t].g0, cs[t].g1);
        auto f = [&](double v) { return (cs[t].g1 - cs[t].g0) * v + cs[t].g0 - floor; };
        const double x = xs[t];
        const double z = zs[t];
        const double lhs = f(x) + beta * detail::positive_part(x - x_prev) + chase_potential(x, z, beta) -
                           chase_potential(x_prev, z_prev, beta);
        const double rhs = 2.0 * (f(z) + beta * detail::positive_part(z - z_prev));
        slack.push_back(rhs - lhs);
        x_prev = x;
        z_prev = z;
    }
    return slack;
}

inline std::vector<double> potential_check(const FractionalSchedule& xs, const Schedule& zs, const CostSeries& cs,
                                           double beta) {
    return potential_check(xs, as_fractional(zs), cs, beta);
}

} // namespace planswitch
