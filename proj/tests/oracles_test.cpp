#include "planswitch/oracles.hpp"

#include <gtest/gtest.h>

#include <numeric>
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

Schedule random_schedule(std::mt19937_64& rng, int n) {
    Schedule s;
    for (int t = 0; t < n; ++t) s.states.push_back(static_cast<State>(rng() & 1));
    return s;
}

Schedule random_feasible(std::mt19937_64& rng, int n, int cap) {
    while (true) {
        auto s = random_schedule(rng, n);
        if (dsp_feasible(s, cap)) return s;
    }
}

} // namespace

TEST(BruteForceSp, Examples) {
    const auto r = brute_force_sp(CostSeries{{3, 0}, {0, 3}, {0, 0}}, 2.0);
    EXPECT_NEAR(r.best_cost, 2.0, kTol);
    // [0,0,0] costs 3, [1,0,0] costs 2, [1,1,0]... costs 5: the minimum is unique
    EXPECT_EQ(r.best_schedule, (Schedule{1, 0, 0}));

    const auto single_fixed = brute_force_sp(CostSeries{{0, 10}}, 1.0);
    EXPECT_EQ(single_fixed.best_schedule, (Schedule{0}));
    EXPECT_NEAR(single_fixed.best_cost, 0.0, kTol);

    const auto single_var = brute_force_sp(CostSeries{{10, 0}}, 1.0);
    EXPECT_EQ(single_var.best_schedule, (Schedule{1}));
    EXPECT_NEAR(single_var.best_cost, 1.0, kTol);
}

TEST(BruteForceSp, TiesCountedAndLexicographicallySmallest) {
    const CostSeries zeros{{0, 0}, {0, 0}, {0, 0}};
    const auto r = brute_force_sp(zeros, 0.0);
    EXPECT_EQ(r.ties, 8u);
    EXPECT_EQ(r.best_schedule, (Schedule{0, 0, 0}));

    // [1,1] costs 1, [0,1] costs 2, [0,0] and [1,0] cost 6
    const auto two = brute_force_sp(CostSeries{{1, 0}, {5, 0}}, 1.0);
    EXPECT_NEAR(two.best_cost, 1.0, kTol);
    EXPECT_EQ(two.ties, 1u);
    EXPECT_EQ(two.best_schedule, (Schedule{1, 1}));
}

TEST(BruteForceSp, RefusesLongHorizon) {
    CostSeries cs;
    cs.pairs.assign(23, {1, 1});
    EXPECT_THROW(brute_force_sp(cs, 1.0), RefusalError);
    EXPECT_THROW(brute_force_sp(CostSeries{}, 1.0), ValidationError);
}

TEST(BruteForceDsp, Examples) {
    const CostSeries zeros{{0, 0}, {0, 0}, {0, 0}};
    const auto full = brute_force_dsp(zeros, 1.0, 3);
    EXPECT_EQ(full.best_schedule, (Schedule{0, 0, 0}));
    EXPECT_NEAR(full.best_cost, 0.0, kTol);

    // L = 2 rules out [0,0,0]; [0,0,1] pays nothing (run of exactly L) and is lexicographically first
    const auto capped = brute_force_dsp(zeros, 1.0, 2);
    EXPECT_NE(capped.best_schedule, (Schedule{0, 0, 0}));
    EXPECT_TRUE(dsp_feasible(capped.best_schedule, 2));
    EXPECT_NEAR(capped.best_cost, 0.0, kTol);
    EXPECT_EQ(capped.best_schedule, (Schedule{0, 0, 1}));
}

TEST(BruteForceDsp, ZeroFeeMatchesConstantFeeWithoutFee) {
    std::mt19937_64 rng(31);
    for (int i = 0; i < 100; ++i) {
        const int n = std::uniform_int_distribution<int>(1, 10)(rng);
        const auto cs = random_series(rng, n);
        EXPECT_NEAR(brute_force_dsp(cs, 0.0, n).best_cost, brute_force_sp(cs, 0.0).best_cost, kTol);
    }
}

TEST(DpDsp, FullLengthContractIsFree) {
    const auto r = dp_dsp(CostSeries{{0, 0}, {0, 0}, {0, 0}}, 1.0, 3, FeeMode::literal);
    EXPECT_NEAR(r.best_cost, 0.0, kTol);
    EXPECT_EQ(r.best_schedule, (Schedule{0, 0, 0}));
}

TEST(DpDsp, MatchesExhaustiveSearch) {
    std::mt19937_64 rng(32);
    for (int i = 0; i < 500; ++i) {
        const int n = std::uniform_int_distribution<int>(1, 12)(rng);
        const int cap = std::uniform_int_distribution<int>(1, n)(rng);
        const double alpha = std::vector<double>{0.0, 0.1, 1.0}[i % 3];
        const auto mode = i % 2 ? FeeMode::literal : FeeMode::transition_only;
        const auto cs = random_series(rng, n);
        const auto dp = dp_dsp(cs, alpha, cap, mode);
        const auto bf = brute_force_dsp(cs, alpha, cap, mode);
        EXPECT_NEAR(dp.best_cost, bf.best_cost, kTol);
        EXPECT_EQ(dp.ties, bf.ties);
        EXPECT_EQ(dp.best_schedule, bf.best_schedule);
    }
}

TEST(DpDsp, ZeroFeeLongContractMatchesConstantFee) {
    std::mt19937_64 rng(33);
    for (int i = 0; i < 100; ++i) {
        const int n = std::uniform_int_distribution<int>(1, 12)(rng);
        const auto cs = random_series(rng, n);
        EXPECT_NEAR(dp_dsp(cs, 0.0, n + 3).best_cost, brute_force_sp(cs, 0.0).best_cost, kTol);
    }
}

TEST(DpSp, MatchesExhaustiveSearch) {
    std::mt19937_64 rng(34);
    for (int i = 0; i < 300; ++i) {
        const int n = std::uniform_int_distribution<int>(1, 12)(rng);
        const auto cs = random_series(rng, n);
        const double beta = std::vector<double>{0.0, 0.5, 1, 2, 5}[i % 5];
        const auto dp = dp_sp(cs, beta);
        const auto bf = brute_force_sp(cs, beta);
        EXPECT_NEAR(dp.best_cost, bf.best_cost, kTol);
        EXPECT_EQ(dp.ties, bf.ties);
        EXPECT_EQ(dp.best_schedule, bf.best_schedule);
    }
}

TEST(OracleResult, BestCostIsObjectiveOfBestSchedule) {
    std::mt19937_64 rng(35);
    for (int i = 0; i < 50; ++i) {
        const auto cs = random_series(rng, 9);
        const auto r = brute_force_sp(cs, 1.5);
        EXPECT_GE(r.ties, 1u);
        EXPECT_EQ(r.best_cost, sp_cost(r.best_schedule, cs, 1.5));
    }
}

TEST(PhiIdentitySp, Examples) {
    const CostSeries cs{{3, 0}, {0, 3}, {0, 0}};
    const auto sides = phi_identity_sp({1, 0, 0}, cs, 2.0);
    EXPECT_NEAR(sides.lhs, 2.0, kTol);
    EXPECT_NEAR(sides.rhs, 2.0, kTol);

    const CostSeries other{{1.25, 9}, {4, 2}, {0.5, 0.75}};
    const auto flat = phi_identity_sp({0, 0, 0}, other, 3.0);
    EXPECT_NEAR(flat.lhs, 5.75, kTol);
    EXPECT_NEAR(flat.rhs, 5.75, kTol);
}

TEST(PhiIdentitySp, HoldsForArbitrarySchedules) {
    std::mt19937_64 rng(36);
    for (int i = 0; i < 1000; ++i) {
        const int n = std::uniform_int_distribution<int>(1, 20)(rng);
        const auto cs = random_series(rng, n);
        const double beta = std::uniform_real_distribution<double>(0.0, 10.0)(rng);
        const auto sides = phi_identity_sp(random_schedule(rng, n), cs, beta);
        EXPECT_NEAR(sides.lhs, sides.rhs, kTol);
    }
}

TEST(PhiIdentityDsp, SingleFullRun) {
    const CostSeries cs{{1, 4}, {2, 0}, {0.5, 3}};
    const double alpha = 0.75;
    const int cap = 5;
    const auto sides = phi_identity_dsp({0, 0, 0}, cs, alpha, cap);
    const double expected = alpha * (cap - 3) + 3.5;
    EXPECT_NEAR(sides.lhs, expected, kTol);
    EXPECT_NEAR(sides.rhs, expected, kTol);
}

TEST(PhiIdentityDsp, ZeroDriftReducesToConstantFeeForm) {
    std::mt19937_64 rng(37);
    for (int i = 0; i < 200; ++i) {
        const int n = std::uniform_int_distribution<int>(1, 12)(rng);
        const auto cs = random_series(rng, n);
        const auto s = random_feasible(rng, n, n);
        const auto d = phi_identity_dsp(s, cs, 0.0, n);
        const auto c = phi_identity_sp(s, cs, 0.0);
        EXPECT_NEAR(d.rhs, c.rhs, kTol);
        EXPECT_NEAR(d.lhs, c.lhs, kTol);
    }
}

TEST(PhiIdentityDsp, HoldsForArbitraryFeasibleSchedules) {
    std::mt19937_64 rng(38);
    for (int i = 0; i < 1000; ++i) {
        const int n = std::uniform_int_distribution<int>(1, 16)(rng);
        const int cap = std::uniform_int_distribution<int>(1, n + 2)(rng);
        const auto cs = random_series(rng, n);
        const double alpha = std::uniform_real_distribution<double>(0.0, 3.0)(rng);
        const auto sides = phi_identity_dsp(random_feasible(rng, n, cap), cs, alpha, cap);
        EXPECT_NEAR(sides.lhs, sides.rhs, kTol);
    }
}

TEST(PotentialCheck, ZeroCostsZeroSlack) {
    const CostSeries zeros{{0, 0}, {0, 0}, {0, 0}};
    FractionalSchedule x{{0, 0, 0}};
    for (double s : potential_check(x, x, zeros, 2.0)) EXPECT_EQ(s, 0.0);
}

TEST(PotentialCheck, SelfComparisonPrefixNonNegative) {
    std::mt19937_64 rng(39);
    for (int i = 0; i < 300; ++i) {
        const double beta = std::uniform_real_distribution<double>(0.5, 5.0)(rng);
        const auto cs = random_series(rng, 30, beta);
        const auto x = cchase(delta_trace(cs, beta));
        double cumulative = 0.0;
        for (double s : potential_check(x, x, cs, beta)) {
            cumulative += s;
            EXPECT_GE(cumulative, -kTol);
        }
    }
}

TEST(PotentialCheck, AgainstOptimalScheduleCertifiesTwoCompetitive) {
    std::mt19937_64 rng(40);
    for (int i = 0; i < 300; ++i) {
        const double beta = std::uniform_real_distribution<double>(0.5, 5.0)(rng);
        const auto cs = random_series(rng, 30, beta);
        const auto dt = delta_trace(cs, beta);
        const auto slack = potential_check(cchase(dt), ofa_s(dt), cs, beta);
        double cumulative = 0.0;
        for (double s : slack) {
            cumulative += s;
            EXPECT_GE(cumulative, -kTol);
        }
    }
}

TEST(PotentialCheck, TightInstanceSlackVanishes) {
    // slot 1 = (d*beta, 0), slot 2 = (0, d*beta); cCHASE plays x = (d, 0), compare with z = 0
    const double beta = 1.0;
    double previous = 1.0;
    for (double d : {0.2, 0.1, 0.05, 0.01}) {
        const CostSeries cs{{d * beta, 0.0}, {0.0, d * beta}};
        const auto x = cchase(delta_trace(cs, beta));
        const auto slack = potential_check(x, FractionalSchedule{{0.0, 0.0}}, cs, beta);
        const double total = std::accumulate(slack.begin(), slack.end(), 0.0);
        EXPECT_NEAR(total, d * d * beta, kTol);
        EXPECT_LT(total, previous);
        previous = total;
    }
}
