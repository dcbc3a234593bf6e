#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "evgrow/surround1d.hpp"

using namespace evgrow;

namespace {

std::vector<double> linspace(double lo, double hi, int count) {
    std::vector<double> xs;
    xs.reserve(count);
    for (int i = 0; i < count; ++i) xs.push_back(lo + (hi - lo) * i / (count - 1));
    return xs;
}

}  // namespace

TEST(BalanceObjective, CollapsedMixtureGivesKl) {
    const auto fam = gaussian_location(1);
    // w = 0 collapses the mixture onto mu-, so f(mu-, 0) = D(P_{-1} || P_0)
    EXPECT_NEAR(balance_objective(fam, -1.0, 1.0, -1.0, 0.0, 1), 0.5, 1e-8);
    // w = 1: f(mu-, 1) = -D(P_{-1} || P_{+1}) + D(P_{-1} || P_0) = -2 + 0.5
    EXPECT_NEAR(balance_objective(fam, -1.0, 1.0, -1.0, 1.0, 1), -1.5, 1e-8);
}

TEST(BalanceObjective, NegativeAtNull) {
    for (const auto& fam : {gaussian_location(1), scaled_bernoulli(0.3)}) {
        for (double w : {0.2, 0.5, 0.8}) {
            const double mp = fam.is_discrete() ? 0.8 : 1.0;
            EXPECT_LT(balance_objective(fam, -0.5, mp, 0.0, w, 1), 0.0) << fam.name;
        }
    }
}

TEST(BalanceObjective, PreconditionErrors) {
    const auto fam = gaussian_location(1);
    EXPECT_THROW(balance_objective(fam, 0.5, 1.0, 0.0, 0.5, 1), MeanOutOfRange);
    EXPECT_THROW(balance_objective(fam, -1.0, 1.0, 0.0, 1.5, 1), ConfigError);
    const auto bern = scaled_bernoulli(0.3);
    EXPECT_THROW(balance_objective(bern, -2.0, 1.0, 0.0, 0.5, 1), MeanOutOfRange);
}

TEST(SolveBalance, SymmetricGaussianIsFair) {
    const auto fam = gaussian_location(1);
    for (double a : {0.5, 1.0, 2.0}) {
        const auto res = solve_balance(fam, -a, a, 1);
        EXPECT_NEAR(res.w0, 0.5, 1e-10) << "a=" << a;
        EXPECT_LT(res.residual, 1e-9);
    }
}

TEST(SolveBalance, AsymmetricResidualContract) {
    const auto fam = gaussian_location(1);
    const auto res = solve_balance(fam, -1.0, 2.0, 1);
    EXPECT_GT(res.w0, 0.0);
    EXPECT_LT(res.w0, 1.0);
    EXPECT_LT(res.residual, 1e-9);
    // prior bookkeeping
    ASSERT_EQ(res.prior.atoms.size(), 2u);
    EXPECT_NEAR(res.prior.atoms[0].second + res.prior.atoms[1].second, 1.0, 1e-12);
}

TEST(SolveBalance, GridScanOracleAgreement) {
    // coarse version of the acceptance-grade scan: locate the sign change of
    // h(w) on a dense w-grid and compare with the bisection result
    const auto fam = gaussian_location(1);
    const auto res = solve_balance(fam, -1.0, 2.0, 1);
    auto h = [&](double w) {
        return balance_objective(fam, -1.0, 2.0, -1.0, w, 1) -
               balance_objective(fam, -1.0, 2.0, 2.0, w, 1);
    };
    const int grid = 2'000;
    double w_oracle = -1.0;
    double prev = h(0.0);
    for (int i = 1; i <= grid; ++i) {
        const double w = double(i) / grid;
        const double cur = h(w);
        if (prev > 0.0 && cur <= 0.0) {
            // linear interpolation of the crossing
            const double w_prev = double(i - 1) / grid;
            w_oracle = w_prev + (0.0 - prev) / (cur - prev) * (w - w_prev);
            break;
        }
        prev = cur;
    }
    ASSERT_GT(w_oracle, 0.0);
    EXPECT_NEAR(res.w0, w_oracle, 1e-6);
}

TEST(SolveBalance, ScaledBernoulliResidual) {
    const auto fam = scaled_bernoulli(0.3);
    const auto res = solve_balance(fam, -0.5, 0.8, 1);
    EXPECT_LT(res.residual, 1e-9);
    EXPECT_GT(res.w0, 0.0);
    EXPECT_LT(res.w0, 1.0);
}

TEST(SolveBalance, WeightMonotonicity) {
    // f(mu-, .) strictly decreasing, f(mu+, .) strictly increasing in w
    const auto fam = gaussian_location(1);
    double prev_minus = balance_objective(fam, -1.0, 2.0, -1.0, 0.0, 1);
    double prev_plus = balance_objective(fam, -1.0, 2.0, 2.0, 0.0, 1);
    for (int i = 1; i <= 100; ++i) {
        const double w = double(i) / 100.0;
        const double cur_minus = balance_objective(fam, -1.0, 2.0, -1.0, w, 1);
        const double cur_plus = balance_objective(fam, -1.0, 2.0, 2.0, w, 1);
        EXPECT_LT(cur_minus, prev_minus);
        EXPECT_GT(cur_plus, prev_plus);
        prev_minus = cur_minus;
        prev_plus = cur_plus;
    }
}

TEST(GrowSurround, TwoRoutesAgreeAndNormalize) {
    const auto fam = gaussian_location(1);
    const auto g = grow_surround_1d(fam, -1.0, 1.0, 1);
    EXPECT_NEAR(g.grow_direct, g.grow_balance, 1e-8);
    EXPECT_GT(g.grow_direct, 0.0);
    EXPECT_LT(g.grow_direct, 0.5);  // mixing costs growth vs the convex case
    const auto null_exp = e_variable_null_expectation(fam, g.ev, SampleConfig{});
    EXPECT_NEAR(null_exp.value, 1.0, 1e-8);
    EXPECT_TRUE(null_exp.within_e_bound());
}

TEST(GrowSurround, SymmetricLogValue) {
    const auto fam = gaussian_location(1);
    const auto g = grow_surround_1d(fam, -1.0, 1.0, 1);
    EXPECT_NEAR(g.w0, 0.5, 1e-10);
    for (double y : {0.3, 1.7, 4.0})
        EXPECT_NEAR(g.ev.log_value(vec1(y)), g.ev.log_value(vec1(-y)), 1e-12);
}

TEST(GrowSurround, BoundaryGrowthEqualsGrowValue) {
    const auto fam = gaussian_location(1);
    const auto g = grow_surround_1d(fam, -1.0, 2.0, 1);
    // Eq-22-style identity: expected log S at either boundary point equals
    // the growth rate
    const double at_plus = balance_objective(fam, -1.0, 2.0, 2.0, g.w0, 1);
    const double at_minus = balance_objective(fam, -1.0, 2.0, -1.0, g.w0, 1);
    EXPECT_NEAR(at_plus, *g.ev.grow_value, 1e-8);
    EXPECT_NEAR(at_minus, *g.ev.grow_value, 1e-8);
}

TEST(GrowSurround, WorstCaseAttainedOnBoundary) {
    const auto fam = gaussian_location(1);
    const auto g = grow_surround_1d(fam, -1.0, 1.0, 1);
    double inf_growth = kInf;
    for (double mu : linspace(1.0, 4.0, 100))
        inf_growth = std::min(inf_growth, balance_objective(fam, -1.0, 1.0, mu, g.w0, 1));
    for (double mu : linspace(-4.0, -1.0, 100))
        inf_growth = std::min(inf_growth, balance_objective(fam, -1.0, 1.0, mu, g.w0, 1));
    EXPECT_NEAR(inf_growth, *g.ev.grow_value, 1e-8);
}

TEST(GrowSurround, SaddlePropertyAgainstProbeDensities) {
    const auto fam = gaussian_location(1);
    const double mu_minus = -1.0, mu_plus = 1.0;
    const auto g = grow_surround_1d(fam, mu_minus, mu_plus, 1);
    // family-member probes: min over boundary of E[log pbar_nu / p0]
    for (double nu : {-0.5, 0.2, 0.9, 1.5}) {
        const Vec th = natural_of_mean(fam, vec1(nu));
        const double lz = fam.log_partition(th);
        const double at_minus = th[0] * mu_minus - lz;
        const double at_plus = th[0] * mu_plus - lz;
        EXPECT_LE(std::min(at_minus, at_plus), *g.ev.grow_value + 1e-8) << "nu=" << nu;
    }
    // mis-weighted boundary mixtures
    for (double w : {0.1, 0.3, 0.7, 0.95}) {
        const double at_minus = balance_objective(fam, mu_minus, mu_plus, mu_minus, w, 1);
        const double at_plus = balance_objective(fam, mu_minus, mu_plus, mu_plus, w, 1);
        EXPECT_LE(std::min(at_minus, at_plus), *g.ev.grow_value + 1e-8) << "w=" << w;
    }
    // uniform-window probe: the window misses boundary mass, so the growth
    // under either boundary member is -inf and the saddle bound is immediate
    const double window_mass =
        normal_cdf(2.0 - mu_plus) - normal_cdf(-2.0 - mu_plus);
    EXPECT_LT(window_mass, 1.0);
}

TEST(MonotonicityScan, GaussianCleanOnBothSides) {
    const auto fam = gaussian_location(1);
    const auto g = grow_surround_1d(fam, -1.0, 1.0, 1);
    auto grid = linspace(1.0, 4.0, 200);
    const auto right = monotonicity_scan(fam, -1.0, 1.0, g.w0, grid, 1);
    EXPECT_TRUE(right.empty());
    auto lgrid = linspace(-4.0, -1.0, 200);
    const auto left = monotonicity_scan(fam, -1.0, 1.0, g.w0, lgrid, 1);
    EXPECT_TRUE(left.empty());
}

TEST(MonotonicityScan, ScaledBernoulliClean) {
    const auto fam = scaled_bernoulli(0.3);
    const double mu_minus = -0.5, mu_plus = 0.8;
    const auto g = grow_surround_1d(fam, mu_minus, mu_plus, 1);
    const auto right =
        monotonicity_scan(fam, mu_minus, mu_plus, g.w0, linspace(0.8, 3.2, 200), 1);
    EXPECT_TRUE(right.empty());
    const auto left =
        monotonicity_scan(fam, mu_minus, mu_plus, g.w0, linspace(-1.4, -0.5, 200), 1);
    EXPECT_TRUE(left.empty());
}

TEST(MonotonicityScan, SinglePointGridHasNoPairs) {
    const auto fam = gaussian_location(1);
    EXPECT_TRUE(monotonicity_scan(fam, -1.0, 1.0, 0.5, {2.0}, 1).empty());
}
