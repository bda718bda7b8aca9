#pragma once

// Cumulative cost-difference recurrences and the chasing algorithms built on them:
// the offline backward pass, the deterministic and randomized forward chasers, and the
// fractional chaser. Each online algorithm exists both as a batch function and as a
// single-step function over an OnlineState.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "planswitch/cost_model.hpp"
#include "planswitch/error.hpp"

namespace planswitch {

/// Delta(0..T), clamped to [-beta, 0]. values[0] == -beta.
struct DeltaTrace {
    std::vector<double> values;
    double beta = 0.0;
    double drift = 0.0;

    std::size_t horizon() const noexcept { return values.empty() ? 0 : values.size() - 1; }
    double operator[](std::size_t t) const { return values[t]; }
};

struct OnlineState {
    std::size_t t = 0;
    double prev_delta = 0.0;
    State prev_state = kFixed;
};

/// Relaxed schedule, x_t in [0, 1], implicit x_0 = 0.
struct FractionalSchedule {
    std::vector<double> x;

    std::size_t size() const noexcept { return x.size(); }
    double operator[](std::size_t i) const { return x[i]; }
};

/// g_t(0) - g_t(1) for 1-based t.
inline double delta(const CostSeries& cs, std::size_t t) {
    if (t < 1 || t > cs.size())
        throw ValidationError("slot index " + std::to_string(t) + " outside [1, " + std::to_string(cs.size()) + "]");
    return cs[t - 1].g0 - cs[t - 1].g1;
}

/// One clamp step of the recurrence. min/max leave the bounds bit-exact.
inline double advance_delta(double prev, const CostPair& pair, double beta, double drift) noexcept {
    return std::min(0.0, std::max(prev + (pair.g0 - pair.g1) - drift, -beta));
}

inline DeltaTrace delta_trace(const CostSeries& cs, double beta, double drift = 0.0) {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw ValidationError("beta must be finite and > 0");
    if (!(drift >= 0.0) || !std::isfinite(drift)) throw ValidationError("drift must be finite and >= 0");
    DeltaTrace dt;
    dt.beta = beta;
    dt.drift = drift;
    dt.values.reserve(cs.size() + 1);
    dt.values.push_back(-beta);
    for (const auto& pair : cs.pairs) dt.values.push_back(advance_delta(dt.values.back(), pair, beta, drift));
    return dt;
}

/// Drift form for the decreasing-fee problem: beta = alpha * L, drift = alpha.
inline DeltaTrace drift_delta_trace(const CostSeries& cs, double alpha, int contract_len) {
    if (contract_len < 1) throw ValidationError("contract length must be >= 1");
    return delta_trace(cs, alpha * contract_len, alpha);
}

/// Streaming form of delta_trace.
class DeltaTracker {
public:
    DeltaTracker(double beta, double drift = 0.0) : beta_(beta), drift_(drift), current_(-beta) {
        if (!(beta > 0.0)) throw ValidationError("beta must be > 0");
        if (!(drift >= 0.0)) throw ValidationError("drift must be >= 0");
    }

    double push(const CostPair& pair) noexcept { return current_ = advance_delta(current_, pair, beta_, drift_); }
    double current() const noexcept { return current_; }
    double beta() const noexcept { return beta_; }

private:
    double beta_;
    double drift_;
    double current_;
};

/// Backward pass with s_{T+1} = 0.
inline Schedule ofa_s(const DeltaTrace& dt) {
    const std::size_t horizon = dt.horizon();
    std::vector<State> s(horizon);
    State next = kFixed;
    for (std::size_t t = horizon; t >= 1; --t) {
        const double d = dt[t];
        if (d == -dt.beta)
            next = kFixed;
        else if (d == 0.0)
            next = kVariable;
        s[t - 1] = next;
    }
    return Schedule(std::move(s));
}

inline OnlineState initial_online_state(double beta) noexcept { return OnlineState{0, -beta, kFixed}; }

inline std::pair<OnlineState, State> gchase_step(const OnlineState& st, double delta_t, double beta) noexcept {
    State s = st.prev_state;
    if (delta_t == -beta)
        s = kFixed;
    else if (delta_t == 0.0)
        s = kVariable;
    return {OnlineState{st.t + 1, delta_t, s}, s};
}

/// Forward pass with s_0 = 0. Reads only the Delta sequence.
inline Schedule gchase_s(const DeltaTrace& dt) {
    std::vector<State> s;
    s.reserve(dt.horizon());
    auto st = initial_online_state(dt.beta);
    for (std::size_t t = 1; t <= dt.horizon(); ++t) {
        auto [next, state] = gchase_step(st, dt[t], dt.beta);
        s.push_back(state);
        st = next;
    }
    return Schedule(std::move(s));
}

/// Probability that the randomized chaser occupies state 1 at t, given Delta(t-1), Delta(t)
/// and the state it held at t-1.
inline double variable_probability(double prev_delta, double delta_t, State prev_state, double beta) noexcept {
    if (delta_t == 0.0) return 1.0;
    if (delta_t == -beta) return 0.0;
    if (prev_delta <= delta_t) {
        // rising: state 1 is sticky, state 0 climbs with probability 1 - Delta(t)/Delta(t-1)
        if (prev_state == kVariable) return 1.0;
        return 1.0 - delta_t / prev_delta;
    }
    // falling: state 0 is sticky, state 1 survives with probability (beta+Delta(t))/(beta+Delta(t-1))
    if (prev_state == kFixed) return 0.0;
    return (beta + delta_t) / (beta + prev_delta);
}

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit engine.
template <class URBG>
    requires std::uniform_random_bit_generator<URBG>
double unit_draw(URBG& rng) {
    static_assert(URBG::max() - URBG::min() == ~std::uint64_t{0}, "unit_draw needs a full 64-bit engine");
    return static_cast<double>((rng() - URBG::min()) >> 11) * 0x1.0p-53;
}

namespace detail {

inline void check_reachable(const OnlineState& st, double beta) {
    if (st.t == 0) return;
    if (st.prev_delta == 0.0 && st.prev_state == kFixed)
        throw InvariantViolation("randomized chaser in state 0 with Delta at 0");
    if (st.prev_delta == -beta && st.prev_state == kVariable)
        throw InvariantViolation("randomized chaser in state 1 with Delta at -beta");
}

} // namespace detail

/// One step of the randomized chaser: switch when the draw falls below the switch probability.
template <class URBG>
std::pair<OnlineState, State> gchase_r_step(const OnlineState& st, double delta_t, double beta, URBG& rng) {
    detail::check_reachable(st, beta);
    const double p1 = variable_probability(st.prev_delta, delta_t, st.prev_state, beta);
    State s = st.prev_state;
    if (p1 == 1.0)
        s = kVariable;
    else if (p1 == 0.0)
        s = kFixed;
    else {
        const double switch_prob = st.prev_state == kFixed ? p1 : 1.0 - p1;
        if (unit_draw(rng) < switch_prob) s = st.prev_state == kFixed ? kVariable : kFixed;
    }
    return {OnlineState{st.t + 1, delta_t, s}, s};
}

template <class URBG>
Schedule gchase_r(const DeltaTrace& dt, URBG& rng) {
    std::vector<State> s;
    s.reserve(dt.horizon());
    auto st = initial_online_state(dt.beta);
    for (std::size_t t = 1; t <= dt.horizon(); ++t) {
        auto [next, state] = gchase_r_step(st, dt[t], dt.beta, rng);
        s.push_back(state);
        st = next;
    }
    return Schedule(std::move(s));
}

inline FractionalSchedule cchase(const DeltaTrace& dt) {
    FractionalSchedule fs;
    fs.x.reserve(dt.horizon());
    for (std::size_t t = 1; t <= dt.horizon(); ++t) fs.x.push_back((dt.beta + dt[t]) / dt.beta);
    return fs;
}

/// Relaxed objective: linear interpolation of g plus beta * (x_t - x_{t-1})^+ with x_0 = 0.
inline double csp_cost(const FractionalSchedule& xs, const CostSeries& cs, double beta) {
    detail::require_same_length(xs.size(), cs.size());
    double total = 0.0;
    double prev = 0.0;
    for (std::size_t t = 0; t < xs.size(); ++t) {
        const double x = xs[t];
        if (!(x >= 0.0 && x <= 1.0)) throw ValidationError("fractional state outside [0, 1]");
        total += (cs[t].g1 - cs[t].g0) * x + cs[t].g0 + beta * detail::positive_part(x - prev);
        prev = x;
    }
    return total;
}

/// Pr[s_t = 1] of the randomized chaser, propagated through its transition kernel.
inline std::vector<double> marginal_probabilities(const DeltaTrace& dt) {
    std::vector<double> p;
    p.reserve(dt.horizon());
    double prev = 0.0;
    for (std::size_t t = 1; t <= dt.horizon(); ++t) {
        const double from_var = variable_probability(dt[t - 1], dt[t], kVariable, dt.beta);
        const double from_fixed = variable_probability(dt[t - 1], dt[t], kFixed, dt.beta);
        const double cur = prev * from_var + (1.0 - prev) * from_fixed;
        p.push_back(cur);
        prev = cur;
    }
    return p;
}

/// Output of a chaser that caps zero-runs at the contract length.
struct CappedSchedule {
    Schedule schedule;
    std::size_t forced_switches = 0;
};

/// Deterministic chaser on the drift trace, forced to state 1 once a zero-run reaches L slots.
inline CappedSchedule gchase_s_capped(const DeltaTrace& dt, int contract_len) {
    if (contract_len < 1) throw ValidationError("contract length must be >= 1");
    const auto cap = static_cast<std::size_t>(contract_len);
    CappedSchedule out;
    out.schedule.states.reserve(dt.horizon());
    auto st = initial_online_state(dt.beta);
    std::size_t run = 0;
    for (std::size_t t = 1; t <= dt.horizon(); ++t) {
        auto [next, s] = gchase_step(st, dt[t], dt.beta);
        if (s == kFixed && run == cap) {
            s = kVariable;
            next.prev_state = kVariable;
            ++out.forced_switches;
        }
        run = (s == kFixed) ? run + 1 : 0;
        out.schedule.states.push_back(s);
        st = next;
    }
    return out;
}

/// Randomized chaser with the same zero-run cap. Forced moves can leave the chaser in
/// combinations the unconstrained kernel never reaches, so the reachability check is skipped.
template <class URBG>
CappedSchedule gchase_r_capped(const DeltaTrace& dt, int contract_len, URBG& rng) {
    if (contract_len < 1) throw ValidationError("contract length must be >= 1");
    const auto cap = static_cast<std::size_t>(contract_len);
    CappedSchedule out;
    out.schedule.states.reserve(dt.horizon());
    State prev = kFixed;
    std::size_t run = 0;
    for (std::size_t t = 1; t <= dt.horizon(); ++t) {
        const double p1 = variable_probability(dt[t - 1], dt[t], prev, dt.beta);
        State s = prev;
        if (p1 == 1.0)
            s = kVariable;
        else if (p1 == 0.0)
            s = kFixed;
        else {
            const double switch_prob = prev == kFixed ? p1 : 1.0 - p1;
            if (unit_draw(rng) < switch_prob) s = prev == kFixed ? kVariable : kFixed;
        }
        if (s == kFixed && run == cap) {
            s = kVariable;
            ++out.forced_switches;
        }
        run = (s == kFixed) ? run + 1 : 0;
        out.schedule.states.push_back(s);
        prev = s;
    }
    return out;
}

/// Online player wrapping the deterministic chaser. Sees one cost pair per call.
class GChasePlayer {
public:
    explicit GChasePlayer(double beta) : tracker_(beta), state_(initial_online_state(beta)) {}

    State observe(const CostPair& pair) {
        const double d = tracker_.push(pair);
        auto [next, s] = gchase_step(state_, d, tracker_.beta());
        state_ = next;
        return s;
    }

    const OnlineState& state() const noexcept { return state_; }

private:
    DeltaTracker tracker_;
    OnlineState state_;
};

template <class URBG = std::mt19937_64>
class GChaseRandomPlayer {
public:
    GChaseRandomPlayer(double beta, std::uint64_t seed)
        : tracker_(beta), state_(initial_online_state(beta)), rng_(seed) {}

    State observe(const CostPair& pair) {
        const double d = tracker_.push(pair);
        auto [next, s] = gchase_r_step(state_, d, tracker_.beta(), rng_);
        state_ = next;
        return s;
    }

private:
    DeltaTracker tracker_;
    OnlineState state_;
    URBG rng_;
};

template <class P>
concept OnlinePlayer = requires(P p, const CostPair& c) {
    { p.observe(c) } -> std::same_as<State>;
};

} // namespace planswitch
