#pragma once

// Self-check suites behind `planswitch verify`. Each check reports pass/fail with a short detail
// line; nothing here throws on a failed check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "planswitch/adversary.hpp"
#include "planswitch/chase.hpp"
#include "planswitch/cost_model.hpp"
#include "planswitch/error.hpp"
#include "planswitch/oracles.hpp"

namespace planswitch {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct SuiteResult {
    std::string suite;
    std::vector<CheckResult> checks;

    bool passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
    }
};

inline CostSeries random_costs(std::mt19937_64& rng, std::size_t horizon, double hi = 10.0) {
    std::uniform_real_distribution<double> g(0.0, hi);
    CostSeries cs;
    cs.pairs.reserve(horizon);
    for (std::size_t t = 0; t < horizon; ++t) {
        const double a = g(rng);
        cs.pairs.push_back({a, g(rng)});
    }
    return cs;
}

inline Schedule random_schedule(std::mt19937_64& rng, std::size_t horizon) {
    std::bernoulli_distribution coin(0.5);
    std::vector<State> s(horizon);
    for (auto& v : s) v = coin(rng) ? kVariable : kFixed;
    return Schedule(std::move(s));
}

namespace detail {

inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

inline std::string fmt_count(std::size_t bad, std::size_t total, double worst) {
    std::ostringstream os;
    os << bad << "/" << total << " mismatches, worst |diff| " << worst;
    return os.str();
}

} // namespace detail

inline SuiteResult verify_oracle(std::uint64_t seed) {
    SuiteResult out{"oracle", {}};
    std::mt19937_64 rng(seed);
    const double betas[] = {0.5, 1.0, 2.0, 5.0};

    std::size_t bad = 0;
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const auto horizon = std::uniform_int_distribution<std::size_t>(1, 12)(rng);
        const double beta = betas[i % 4];
        const auto cs = random_costs(rng, horizon);
        const double a = sp_cost(ofa_s(delta_trace(cs, beta)), cs, beta);
        const double b = brute_force_sp(cs, beta).best_cost;
        worst = std::max(worst, std::abs(a - b));
        if (!detail::close(a, b, 1e-9)) ++bad;
    }
    out.checks.push_back({"ofa matches exhaustive search", bad == 0, detail::fmt_count(bad, 1000, worst)});

    bad = 0;
    worst = 0.0;
    for (int i = 0; i < 500; ++i) {
        const auto horizon = std::uniform_int_distribution<std::size_t>(1, 12)(rng);
        const int len = std::uniform_int_distribution<int>(1, static_cast<int>(horizon))(rng);
        const double alpha = std::uniform_real_distribution<double>(0.05, 2.0)(rng);
        const auto mode = i % 2 == 0 ? FeeMode::literal : FeeMode::transition_only;
        const auto cs = random_costs(rng, horizon);
        const auto dp = dp_dsp(cs, alpha, len, mode);
        const auto bf = brute_force_dsp(cs, alpha, len, mode);
        worst = std::max(worst, std::abs(dp.best_cost - bf.best_cost));
        if (!detail::close(dp.best_cost, bf.best_cost, 1e-9)) ++bad;
    }
    out.checks.push_back({"decreasing-fee dp matches exhaustive search", bad == 0, detail::fmt_count(bad, 500, worst)});
    return out;
}

inline SuiteResult verify_ratio(std::uint64_t seed) {
    SuiteResult out{"ratio", {}};
    std::mt19937_64 rng(seed);
    std::size_t bad3 = 0, bad2 = 0;
    double worst3 = 0.0, worst2 = 0.0;
    constexpr int n = 10000;
    for (int i = 0; i < n; ++i) {
        const auto horizon = std::uniform_int_distribution<std::size_t>(1, 40)(rng);
        const double beta = std::uniform_real_distribution<double>(0.1, 10.0)(rng);
        const auto cs = random_costs(rng, horizon);
        const auto dt = delta_trace(cs, beta);
        const double opt = sp_cost(ofa_s(dt), cs, beta);
        const double det = sp_cost(gchase_s(dt), cs, beta);
        const double frac = csp_cost(cchase(dt), cs, beta);
        const double tol = 1e-9 * std::max(1.0, opt);
        if (opt > 0.0) {
            worst3 = std::max(worst3, det / opt);
            worst2 = std::max(worst2, frac / opt);
        }
        if (det > 3.0 * opt + tol) ++bad3;
        if (frac > 2.0 * opt + tol) ++bad2;
    }
    std::ostringstream d3, d2;
    d3 << bad3 << "/" << n << " violations, worst ratio " << worst3;
    d2 << bad2 << "/" << n << " violations, worst ratio " << worst2;
    out.checks.push_back({"gchase within 3x of offline", bad3 == 0, d3.str()});
    out.checks.push_back({"cchase within 2x of offline", bad2 == 0, d2.str()});

    GChasePlayer player(1.0);
    const auto adv = deterministic_adversary(player, 1.0, 600, 0.01);
    const double r = adv.report.ratio.value_or(0.0);
    std::ostringstream da;
    da << "ratio " << r << " over T=600";
    out.checks.push_back({"adaptive adversary pushes gchase to >= 2.9 and <= 3", r >= 2.9 && r <= 3.0 + 1e-9, da.str()});

    const auto lb = randomized_lb_instance(1.0, 0.01, 2);
    const auto lb_dt = delta_trace(lb, 1.0);
    const double lb_frac = csp_cost(cchase(lb_dt), lb, 1.0);
    const double lb_opt = sp_cost(ofa_s(lb_dt), lb, 1.0);
    std::ostringstream dl;
    dl << "cost " << lb_frac << ", ratio " << lb_frac / lb_opt;
    out.checks.push_back({"lower-bound instance reaches 2 - delta",
                          std::abs(lb_frac - 0.0199) <= 1e-9 && std::abs(lb_frac / lb_opt - 1.99) <= 1e-9, dl.str()});
    return out;
}

inline SuiteResult verify_montecarlo(std::uint64_t seed, std::size_t instances = 20, std::size_t replications = 20000) {
    SuiteResult out{"montecarlo", {}};
    std::mt19937_64 rng(seed);
    std::size_t bad_mean = 0, bad_bound = 0, bad_marg = 0, marg_total = 0;
    for (std::size_t k = 0; k < instances; ++k) {
        const double beta = std::uniform_real_distribution<double>(0.5, 5.0)(rng);
        const auto horizon = std::uniform_int_distribution<std::size_t>(4, 16)(rng);
        const auto cs = random_costs(rng, horizon, beta);
        const auto dt = delta_trace(cs, beta);
        const auto expected = marginal_probabilities(dt);
        const double frac = csp_cost(cchase(dt), cs, beta);
        const double opt = sp_cost(ofa_s(dt), cs, beta);

        std::vector<std::size_t> ones(horizon, 0);
        const auto summary = replicate(
            [&](std::mt19937_64& r) {
                const auto s = gchase_r(dt, r);
                for (std::size_t t = 0; t < horizon; ++t) ones[t] += s[t];
                return sp_cost(s, cs, beta);
            },
            replications, seed * 1000003 + k * 100000);
        if (std::abs(summary.mean - frac) > 3.0 * summary.stderr_of_mean + 1e-12) ++bad_mean;
        if (summary.mean > 2.0 * opt + 3.0 * summary.stderr_of_mean + 1e-12) ++bad_bound;
        for (std::size_t t = 0; t < horizon; ++t) {
            const double p = expected[t];
            const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(replications));
            const double freq = static_cast<double>(ones[t]) / static_cast<double>(replications);
            ++marg_total;
            if (std::abs(freq - p) > 3.0 * se + 1e-12) ++bad_marg;
        }
    }
    std::ostringstream dm, db, dg;
    dm << bad_mean << "/" << instances << " instances outside 3 standard errors";
    db << bad_bound << "/" << instances << " instances above 2x offline + 3 SE";
    dg << bad_marg << "/" << marg_total << " slots outside 3 binomial SE";
    // a 3-SE band misses about 0.27% of the time per comparison, so a single miss is not evidence
    out.checks.push_back({"randomized mean matches cchase", bad_mean <= 1, dm.str()});
    out.checks.push_back({"randomized mean within 2x of offline", bad_bound == 0, db.str()});
    out.checks.push_back({"per-slot marginals match cchase",
                          static_cast<double>(bad_marg) <= std::max(2.0, 0.01 * static_cast<double>(marg_total)),
                          dg.str()});
    return out;
}

inline SuiteResult verify_identity(std::uint64_t seed) {
    SuiteResult out{"identity", {}};
    std::mt19937_64 rng(seed);
    constexpr int n = 1000;
    std::size_t bad_p = 0, bad_phi = 0, bad_big = 0;
    double worst_p = 0.0, worst_phi = 0.0, worst_big = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto horizon = std::uniform_int_distribution<std::size_t>(1, 30)(rng);
        const double beta = std::uniform_real_distribution<double>(0.1, 10.0)(rng);
        const auto cs = random_costs(rng, horizon);
        const auto s = random_schedule(rng, horizon);

        const double a = sp_cost(s, cs, beta), b = p2_cost(s, cs, beta);
        worst_p = std::max(worst_p, std::abs(a - b));
        if (!detail::close(a, b, 1e-9)) ++bad_p;

        const auto phi = phi_identity_sp(s, cs, beta);
        worst_phi = std::max(worst_phi, std::abs(phi.lhs - phi.rhs));
        if (!detail::close(phi.lhs, phi.rhs, 1e-9)) ++bad_phi;

        // decreasing-fee identity needs a feasible schedule; force a switch after every L zeros
        const int len = std::uniform_int_distribution<int>(1, 12)(rng);
        const double alpha = std::uniform_real_distribution<double>(0.05, 2.0)(rng);
        std::vector<State> states = s.states;
        int run = 0;
        for (auto& v : states) {
            run = v == kFixed ? run + 1 : 0;
            if (run > len) {
                v = kVariable;
                run = 0;
            }
        }
        const auto big = phi_identity_dsp(Schedule(std::move(states)), cs, alpha, len);
        worst_big = std::max(worst_big, std::abs(big.lhs - big.rhs));
        if (!detail::close(big.lhs, big.rhs, 1e-9)) ++bad_big;
    }
    out.checks.push_back({"switch-cost forms agree", bad_p == 0, detail::fmt_count(bad_p, n, worst_p)});
    out.checks.push_back({"constant-fee prefix identity", bad_phi == 0, detail::fmt_count(bad_phi, n, worst_phi)});
    out.checks.push_back({"decreasing-fee prefix identity", bad_big == 0, detail::fmt_count(bad_big, n, worst_big)});
    return out;
}

inline const std::vector<std::string_view>& verify_suite_names() {
    static const std::vector<std::string_view> names{"oracle", "ratio", "montecarlo", "identity"};
    return names;
}

/// Runs one suite, or every suite for "all". Unknown names are a ValidationError.
inline std::vector<SuiteResult> run_verify(std::string_view suite, std::uint64_t seed) {
    std::vector<SuiteResult> out;
    const bool all = suite == "all";
    if (!all && std::find(verify_suite_names().begin(), verify_suite_names().end(), suite) == verify_suite_names().end())
        throw ValidationError("unknown verify suite '" + std::string(suite) + "'");
    if (all || suite == "oracle") out.push_back(verify_oracle(seed));
    if (all || suite == "ratio") out.push_back(verify_ratio(seed));
    if (all || suite == "montecarlo") out.push_back(verify_montecarlo(seed));
    if (all || suite == "identity") out.push_back(verify_identity(seed));
    return out;
}

} // namespace planswitch
