#include <gtest/gtest.h>

#include <cmath>

#include "evgrow/csc_convex.hpp"

using namespace evgrow;

namespace {

double bern_y_mean(double p, double q) { return (q - p) / (p * (1.0 - p)); }

double bern_kl(double p, double q) {
    return q * std::log(q / p) + (1.0 - q) * std::log((1.0 - q) / (1.0 - p));
}

// independent binomial upper-tail oracle, straight from lgamma
double binom_upper_tail(int n, double p, int k_min) {
    double tail = 0.0;
    for (int k = k_min; k <= n; ++k) {
        const double log_mass = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                                std::lgamma(n - k + 1.0) + k * std::log(p) +
                                (n - k) * std::log1p(-p);
        tail += std::exp(log_mass);
    }
    return tail;
}

}  // namespace

TEST(CscConvex, GaussianIntervalBound) {
    const auto fam = gaussian_location(1);
    const auto rep = csc_convex_bound(fam, MeanSet::interval(1.0, kInf), 1);
    EXPECT_NEAR(rep.D_lower, 0.5, 1e-12);
    EXPECT_DOUBLE_EQ(rep.regret, 0.0);
    EXPECT_NEAR(rep.bound, std::exp(-0.5), 1e-12);
}

TEST(CscConvex, GaussianHalfSpaceBound) {
    const auto fam = gaussian_location(2);
    const auto rep = csc_convex_bound(fam, MeanSet::half_space(vec2(1.0, 0.0), 2.0), 1);
    EXPECT_NEAR(rep.bound, std::exp(-2.0), 1e-10);
}

TEST(CscConvex, VanishingDivergenceGivesVacuousBound) {
    const auto fam = gaussian_location(1);
    const auto rep = csc_convex_bound(fam, MeanSet::interval(1e-7, kInf), 1);
    EXPECT_NEAR(rep.bound, 1.0, 1e-10);
}

TEST(CscConvex, LogBoundScalesLinearlyInN) {
    const auto fam = scaled_bernoulli(0.3);
    const auto set = MeanSet::interval(bern_y_mean(0.3, 0.5), kInf);
    const auto r1 = csc_convex_bound(fam, set, 1);
    const auto r12 = csc_convex_bound(fam, set, 12);
    EXPECT_DOUBLE_EQ(r12.log_bound, 12.0 * r1.log_bound);
}

TEST(OracleProb, ExactBinomialTail) {
    const double p = 0.3;
    const auto fam = scaled_bernoulli(p);
    const auto set = MeanSet::interval(bern_y_mean(p, 0.5), kInf);
    SampleConfig cfg;
    const auto o = oracle_prob(fam, set, 30, cfg);
    EXPECT_EQ(o.kind, OracleKind::exact);
    EXPECT_DOUBLE_EQ(o.se, 0.0);
    // Y >= c(0.5) is exactly {at least 15 successes out of 30}
    EXPECT_NEAR(o.prob, binom_upper_tail(30, p, 15), 1e-12);

    const auto rep = csc_convex_bound_with_oracle(fam, set, 30, cfg);
    EXPECT_TRUE(rep.bound_holds());
    EXPECT_LT(*rep.oracle_prob, rep.bound);  // strictly positive slack
    EXPECT_NEAR(rep.bound, std::exp(-30.0 * bern_kl(p, 0.5)), 1e-12);
}

TEST(OracleProb, GaussianTailMonteCarlo) {
    const auto fam = gaussian_location(1);
    const auto set = MeanSet::interval(1.0, kInf);
    SampleConfig cfg;
    cfg.seed = 2024;
    cfg.mc_samples = 1'000'000;
    const auto o = oracle_prob(fam, set, 1, cfg);
    EXPECT_EQ(o.kind, OracleKind::montecarlo);
    const double truth = 1.0 - normal_cdf(1.0);  // ~0.158655
    EXPECT_NEAR(o.prob, truth, 4.0 * o.se);
    EXPECT_NEAR(o.se, std::sqrt(truth * (1.0 - truth) / 1e6), 2e-4);
}

TEST(OracleProb, EmptyIntersectionIsZero) {
    const auto fam = scaled_bernoulli(0.3);
    // no outcome of two draws lands in [3.0, 3.2]
    const auto o = oracle_prob(fam, MeanSet::interval(3.0, 3.2), 2, SampleConfig{});
    EXPECT_DOUBLE_EQ(o.prob, 0.0);
}

TEST(MleBound, GaussianHalfDivergence) {
    const auto fam = gaussian_location(1);
    SampleConfig cfg;
    cfg.seed = 5;
    cfg.mc_samples = 200'000;
    const auto rep = mle_bound_check_1d(fam, 0.5, +1, 1, cfg);
    EXPECT_NEAR(rep.mu_star, 1.0, 1e-9);
    EXPECT_NEAR(rep.bound, std::exp(-0.5), 1e-12);
    const double truth = 1.0 - normal_cdf(1.0);
    EXPECT_NEAR(rep.prob_sup_event, truth, 5.0 * rep.se + 1e-3);
    EXPECT_TRUE(rep.events_match);
    EXPECT_LE(rep.prob_sup_event, rep.bound);
    EXPECT_LE(rep.prob_fixed_event, rep.bound);
}

TEST(MleBound, NegativeSideIsSymmetric) {
    const auto fam = gaussian_location(1);
    SampleConfig cfg;
    cfg.mc_samples = 100'000;
    const auto rep = mle_bound_check_1d(fam, 0.5, -1, 1, cfg);
    EXPECT_NEAR(rep.mu_star, -1.0, 1e-9);
}

TEST(MleBound, ScaledBernoulliEventIdentity) {
    const double p = 0.3;
    const auto fam = scaled_bernoulli(p);
    const double D = 30.0 * bern_kl(p, 0.5);
    const auto rep = mle_bound_check_1d(fam, D, +1, 30, SampleConfig{});
    EXPECT_EQ(rep.kind, OracleKind::exact);
    EXPECT_TRUE(rep.events_match);
    EXPECT_DOUBLE_EQ(rep.prob_sup_event, rep.prob_fixed_event);
    EXPECT_LE(rep.prob_sup_event, rep.bound + 1e-12);
    EXPECT_NEAR(rep.mu_star, bern_y_mean(p, 0.5), 1e-9);
}

TEST(MleBound, TinyDivergenceIsVacuouslySatisfied) {
    const auto fam = scaled_bernoulli(0.3);
    const auto rep = mle_bound_check_1d(fam, 1e-9, +1, 4, SampleConfig{});
    EXPECT_NEAR(rep.bound, 1.0, 1e-8);
    EXPECT_LE(rep.prob_sup_event, rep.bound + 1e-12);
}

TEST(MleBound, NoSuchRadiusBeyondSupKl) {
    const auto fam = scaled_bernoulli(0.3);
    // per-draw KL towards the upper corner tops out at -log p
    EXPECT_THROW(mle_bound_check_1d(fam, 2.0, +1, 1, SampleConfig{}), NoSuchRadius);
}

TEST(NaiveMarkov, SupRatioIsNotAnEVariable) {
    const auto bern = scaled_bernoulli(0.3);
    for (int n : {1, 5, 20}) {
        const double e = naive_sup_ratio_expectation(bern, n);
        EXPECT_GE(e, 1.0 - 1e-6) << "n=" << n;
        EXPECT_GT(e, 1.0 + 1e-3) << "n=" << n;  // strictly above one in practice
    }
    // Gaussian: even a window-restricted integral already exceeds one
    EXPECT_GE(naive_sup_ratio_expectation(gaussian_location(1), 1), 1.0 - 1e-6);
}
