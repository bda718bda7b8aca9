#include "planswitch/adversary.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace planswitch;

namespace {

constexpr double kTol = 1e-9;

CostSeries random_series(std::mt19937_64& rng, int n, double hi = 10.0) {
    std::uniform_real_distribution<double> g(0.0, hi);
    CostSeries cs;
    for (int t = 0; t < n; ++t) cs.pairs.push_back({g(rng), g(rng)});
    return cs;
}

// Replays a schedule fixed in advance, one state per observed slot.
class ScriptedPlayer {
public:
    explicit ScriptedPlayer(Schedule s) : s_(std::move(s)) {}
    State observe(const CostPair&) { return s_[i_++]; }

private:
    Schedule s_;
    std::size_t i_ = 0;
};

} // namespace

TEST(RandomizedLowerBound, Construction) {
    const auto cs = randomized_lb_instance(1.0, 0.5, 3);
    EXPECT_EQ(cs, (CostSeries{{0.5, 0}, {0, 0.5}, {0, 0.5}}));
    EXPECT_THROW(randomized_lb_instance(1.0, 0.0, 3), ValidationError);
    EXPECT_THROW(randomized_lb_instance(1.0, 1.0, 3), ValidationError);
    EXPECT_THROW(randomized_lb_instance(1.0, 0.5, 1), ValidationError);
    EXPECT_THROW(randomized_lb_instance(0.0, 0.5, 3), ValidationError);
}

TEST(RandomizedLowerBound, FractionalCostAndRatioClosedForm) {
    for (double beta : {0.5, 1.0, 4.0}) {
        for (double d : {0.5, 0.1, 0.01}) {
            for (std::size_t horizon : {2u, 3u, 10u}) {
                const auto cs = randomized_lb_instance(beta, d, horizon);
                const auto dt = delta_trace(cs, beta);
                const double fractional = csp_cost(cchase(dt), cs, beta);
                EXPECT_NEAR(fractional, 2 * d * beta - d * d * beta, kTol);
                const double offline = sp_cost(Schedule(std::vector<State>(horizon, kFixed)), cs, beta);
                EXPECT_NEAR(offline, d * beta, kTol);
                EXPECT_NEAR(fractional / offline, 2.0 - d, kTol);
            }
        }
    }
}

TEST(MeasureRatio, Examples) {
    const CostSeries cs{{1, 0}, {1, 0}, {0, 2}};
    const auto g = measure_ratio([](const CostSeries& c, double b) { return gchase_s(delta_trace(c, b)); }, cs, 2.0);
    ASSERT_TRUE(g.defined());
    EXPECT_NEAR(g.alg_cost, 3.0, kTol);
    EXPECT_NEAR(g.opt_cost, 2.0, kTol);
    EXPECT_NEAR(*g.ratio, 1.5, kTol);

    const auto o = measure_ratio([](const CostSeries& c, double b) { return ofa_s(delta_trace(c, b)); }, cs, 2.0);
    EXPECT_NEAR(*o.ratio, 1.0, kTol);

    const CostSeries zeros{{0, 0}, {0, 0}};
    const auto z = measure_ratio(Schedule{0, 0}, zeros, 1.0);
    EXPECT_FALSE(z.defined());
}

TEST(MeasureRatio, DecreasingFeeAgainstDp) {
    const CostSeries zeros{{0, 0}, {0, 0}, {0, 0}};
    const auto r = measure_ratio_dsp(Schedule{0, 1, 0}, zeros, 1.0, 3);
    EXPECT_NEAR(r.alg_cost, 4.0, kTol);
    EXPECT_FALSE(r.defined());
}

TEST(Adversary, DrivesDeterministicChaserTowardThree) {
    GChasePlayer player(1.0);
    const auto out = deterministic_adversary(player, 1.0, 600, 0.01);
    ASSERT_TRUE(out.report.defined());
    EXPECT_GE(*out.report.ratio, 2.9);
    EXPECT_LE(*out.report.ratio, 3.0);
    EXPECT_EQ(out.online, gchase_s(delta_trace(out.costs, 1.0)));
}

TEST(Adversary, OfflinePlayerOnSameSeriesHasRatioOne) {
    GChasePlayer player(1.0);
    const auto out = deterministic_adversary(player, 1.0, 300, 0.01);
    const auto opt = ofa_s(delta_trace(out.costs, 1.0));
    EXPECT_NEAR(*measure_ratio(opt, out.costs, 1.0).ratio, 1.0, kTol);
}

TEST(Adversary, ShortHorizonUsesExhaustiveOptimum) {
    GChasePlayer player(2.0);
    const auto out = deterministic_adversary(player, 2.0, 12, 0.5);
    EXPECT_NEAR(out.report.opt_cost, brute_force_sp(out.costs, 2.0).best_cost, kTol);
}

TEST(Adversary, ChargesTheOccupiedState) {
    ScriptedPlayer player(Schedule{0, 1, 1, 0});
    const auto out = deterministic_adversary(player, 1.0, 4, 0.25);
    EXPECT_EQ(out.costs, (CostSeries{{0.25, 0}, {0.25, 0}, {0, 0.25}, {0, 0.25}}));
}

TEST(Adversary, CoarseUnitStaysBelowThree) {
    for (double unit : {1.0, 2.0}) {
        GChasePlayer player(1.0);
        const auto out = deterministic_adversary(player, 1.0, 200, unit);
        EXPECT_LT(*out.report.ratio, 3.0);
    }
}

TEST(Adversary, RejectsBadParameters) {
    GChasePlayer player(1.0);
    EXPECT_THROW(deterministic_adversary(player, 1.0, 0, 0.1), ValidationError);
    EXPECT_THROW(deterministic_adversary(player, 1.0, 10, 0.0), ValidationError);
}

TEST(MonteCarlo, RejectsSingleRun) {
    EXPECT_THROW(monte_carlo(CostSeries{{1, 0}}, 1.0, 1, 0), ValidationError);
}

TEST(MonteCarlo, DegenerateInstanceHasNoSpread) {
    const CostSeries zeros{{0, 0}, {0, 0}, {0, 0}};
    const auto r = monte_carlo(zeros, 1.0, 50, 3);
    EXPECT_EQ(*r.mean, 0.0);
    EXPECT_EQ(*r.stderr_of_mean, 0.0);
    EXPECT_FALSE(r.defined());
}

TEST(MonteCarlo, DeterministicUnderSeed) {
    std::mt19937_64 rng(41);
    const auto cs = random_series(rng, 12, 2.0);
    const auto a = monte_carlo(cs, 2.0, 200, 5);
    const auto b = monte_carlo(cs, 2.0, 200, 5);
    EXPECT_EQ(*a.mean, *b.mean);
    EXPECT_EQ(*a.stderr_of_mean, *b.stderr_of_mean);
}

TEST(MonteCarlo, MeanMatchesFractionalChaser) {
    std::mt19937_64 rng(42);
    for (int i = 0; i < 5; ++i) {
        const double beta = 2.0;
        const auto cs = random_series(rng, 12, beta);
        const auto r = monte_carlo(cs, beta, 20000, 1000 * i);
        const double fractional = csp_cost(cchase(delta_trace(cs, beta)), cs, beta);
        EXPECT_LE(std::abs(*r.mean - fractional), 3.0 * *r.stderr_of_mean + 1e-12);
        EXPECT_LE(*r.mean, 2.0 * r.opt_cost + 3.0 * *r.stderr_of_mean);
    }
}

TEST(Ratios, DeterministicWithinThreeFractionalWithinTwo) {
    std::mt19937_64 rng(43);
    for (int i = 0; i < 2000; ++i) {
        const int n = std::uniform_int_distribution<int>(1, 30)(rng);
        const double beta = std::uniform_real_distribution<double>(0.1, 10.0)(rng);
        const auto cs = random_series(rng, n);
        const auto dt = delta_trace(cs, beta);
        const double opt = sp_cost(ofa_s(dt), cs, beta);
        EXPECT_LE(sp_cost(gchase_s(dt), cs, beta), 3.0 * opt + kTol);
        EXPECT_LE(csp_cost(cchase(dt), cs, beta), 2.0 * opt + kTol);
    }
}
