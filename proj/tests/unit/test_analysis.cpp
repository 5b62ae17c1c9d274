#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "predrl/analysis.hpp"

using namespace predrl;

namespace {

// Two states, two actions, H = 2; step-0 arms differ by the given gap and
// step 1 has a unique best action with gap 1.
TabularMdp chain(double gap0) {
    TabularMdp m;
    m.num_states = 2;
    m.num_actions = 2;
    m.horizon = 2;
    m.transitions = ActionTable<std::vector<double>>(2, 2, 2, {1.0, 0.0});
    m.rewards = ActionTable<double>(2, 2, 2, 0.0);
    for (int x = 0; x < 2; ++x) {
        m.rewards(0, x, 0) = 1.0;
        m.rewards(0, x, 1) = 1.0 - gap0;
        m.rewards(1, x, 0) = 1.0;
    }
    m.initial_states = {0};
    return m;
}

}  // namespace

TEST(ExtendedReal, Arithmetic) {
    const auto inf = ExtendedReal::infinity();
    EXPECT_TRUE((ExtendedReal(1.0) + inf).is_infinite());
    EXPECT_TRUE(ExtendedReal(3.0) < inf);
    EXPECT_FALSE(inf < ExtendedReal(3.0));
    EXPECT_EQ(min(inf, ExtendedReal(2.0)).value(), 2.0);
    EXPECT_EQ(inf.str(), "inf");
    EXPECT_THROW(inf.value(), std::logic_error);
    EXPECT_THROW(ExtendedReal(std::nan("")), InvalidArgument);
    EXPECT_EQ((0.0 * inf).value(), 0.0);
}

TEST(LambdaCost, GapBranchOnLargeGaps) {
    const auto p = value_iteration(chain(1.0));
    const double T = 1e12;
    const auto r = lambda_cost(p, T, 1.0);
    const double iota = std::log(2.0 * 2.0 * T);
    // Four suboptimal triples, each with gap 1, and no ties.
    EXPECT_EQ(r.a_mul, 0u);
    EXPECT_EQ(r.a_mul_term, 0.0);
    EXPECT_NEAR(r.gap_sum, 4.0, 1e-12);
    EXPECT_NEAR(r.gap_term.value(), std::pow(2.0, 7) * iota * 4.0, 1e-6);
    EXPECT_EQ(r.lambda_cost, r.gap_term);
}

TEST(LambdaCost, UniformBranchForSmallLambda) {
    const auto p = value_iteration(chain(0.001));
    const double T = 1000.0;
    const auto r = lambda_cost(p, T, 1e-4);
    EXPECT_LT(r.uniform_term, r.gap_term.value());
    EXPECT_DOUBLE_EQ(r.lambda_cost.value(), std::sqrt(1e-4 * T * 4 * std::pow(2.0, 8) * r.iota));
}

TEST(LambdaCost, ZeroOverZeroRule) {
    const auto p = value_iteration(oracle::zero_reward_mdp(2, 2, 2));
    const auto r = lambda_cost(p, 100.0, 0.5);
    EXPECT_EQ(r.gap_sum, 0.0);
    EXPECT_EQ(r.a_mul_term, 0.0);
    EXPECT_EQ(r.lambda_cost.value(), 0.0);
}

TEST(LambdaCost, LowerBoundForLargeLambda) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto m = random_mdp(seed, 3, 3, 2, 0.3);
        const auto p = value_iteration(m);
        const double K = 5000, T = K * 2;
        const double lam = 3.0 * 3 * 8 / K;
        const auto r = lambda_cost(p, T, lam);
        EXPECT_GE(r.lambda_cost.value(), 3.0 * 3 * std::pow(2.0, 6) / 2.0);
    }
}

TEST(LambdaCost, MonotoneInLambdaAndT) {
    const auto p = value_iteration(random_mdp(4, 3, 2, 3, 0.0));
    double prev = 0.0;
    for (double lam = 1e-6; lam <= 1.0; lam *= 1.7) {
        const double c = lambda_cost(p, 1e5, lam).lambda_cost.value();
        EXPECT_GE(c, prev);
        prev = c;
    }
    prev = 0.0;
    for (double T = 1.0; T < 1e9; T *= 3.0) {
        const double c = lambda_cost(p, T, 0.2).lambda_cost.value();
        EXPECT_GE(c, prev);
        prev = c;
    }
}

TEST(LambdaCost, VariantWithLowerGapBound) {
    auto m = chain(0.5);
    // Tie the step-1 actions so that A_mul is non-empty.
    for (int x = 0; x < 2; ++x) m.rewards(1, x, 1) = 1.0;
    const auto p = value_iteration(m);
    ASSERT_GT(p.a_mul_size(), 0u);
    const auto r = lambda_cost(p, 1e6, 1.0, 0.5 * *p.delta_min);
    EXPECT_FALSE(r.variant_gap_term < r.gap_term);
    const auto z = lambda_cost(p, 1e6, 1.0, 0.0);
    EXPECT_TRUE(z.variant_gap_term.is_infinite());
    EXPECT_DOUBLE_EQ(z.variant_cost.value(), z.uniform_term);
}

TEST(LambdaCost, Rejections) {
    const auto p = value_iteration(chain(0.5));
    EXPECT_THROW(lambda_cost(p, 10.0, 0.0), InvalidArgument);
    EXPECT_THROW(lambda_cost(p, 10.0, 1.5), InvalidArgument);
    EXPECT_THROW(lambda_cost(p, 0.5, 0.5), InvalidArgument);
}

TEST(SolveLambda, RightEndpointFixedPoint) {
    const auto p = value_iteration(random_mdp(2, 3, 2, 2, 0.0));
    const double T = 1e6;
    const double R = lambda_cost(p, T, 1.0).lambda_cost.value();
    const auto s = solve_lambda_hat(p, T, R);
    EXPECT_EQ(s.lambda, 1.0);
    EXPECT_FALSE(s.boundary);
}

TEST(SolveLambda, InverseOnUniformBranch) {
    const auto p = value_iteration(chain(1e-3));
    const double T = 2000.0;
    const auto r1 = solve_lambda_hat(p, T, 4e5);
    const auto r2 = solve_lambda_hat(p, T, 8e5);
    ASSERT_FALSE(r1.boundary);
    ASSERT_FALSE(r2.boundary);
    // Doubling R quarters lambda on this branch.
    EXPECT_NEAR(r2.lambda / r1.lambda, 0.25, 1e-6);
    EXPECT_NEAR(r1.lambda, uniform_branch_lambda(p, T, 4e5), 1e-6 * r1.lambda);
    const double back = lambda_cost(p, T, r1.lambda).lambda_cost.value() / r1.lambda;
    EXPECT_LE(std::abs(back - 4e5) / 4e5, 1e-9);
}

TEST(SolveLambda, BoundaryFlags) {
    const auto p = value_iteration(chain(0.5));
    const double T = 1000.0;
    const auto tiny = solve_lambda_hat(p, T, 1e-9);
    EXPECT_EQ(tiny.lambda, 1.0);
    EXPECT_TRUE(tiny.boundary);
    const auto huge = solve_lambda_hat(p, T, 1e300);
    EXPECT_TRUE(huge.boundary);
    EXPECT_LT(huge.lambda, 1.0);
    EXPECT_THROW(solve_lambda_hat(p, T, 0.0), InvalidArgument);
}

TEST(FoolingTerms, EmptySet) {
    const auto p = value_iteration(chain(0.5));
    const auto f = fooling_set(p.q_star, p, 0.05, 0.1);
    const auto t = fooling_regret_terms(p, f, 100.0, 0.1);
    EXPECT_EQ(t.sqrt_term, 0.0);
    EXPECT_EQ(t.gap_term.value(), 0.0);
}

TEST(FoolingTerms, GapAtHalfLevelIsInfinite) {
    const auto p = value_iteration(bandit_gap_instance(2, 0.1));
    FoolingSet f;
    f.eps1 = 0.1;
    f.eps2 = 0.2;
    f.members = {{0, 0, 1}};
    EXPECT_TRUE(fooling_regret_terms(p, f, 100.0, 0.2).gap_term.is_infinite());
}

TEST(FoolingTerms, UnitGaps) {
    const auto p = value_iteration(chain(1.0));
    FoolingSet f;
    f.members = {{0, 0, 1}, {0, 1, 1}, {1, 0, 1}, {1, 1, 1}};
    const double T = 500.0;
    const auto t = fooling_regret_terms(p, f, T, 0.0);
    const double iota = std::log(4.0 * T);
    EXPECT_NEAR(t.gap_term.value(), 4.0 * std::pow(2.0, 4) * iota, 1e-9);
    EXPECT_NEAR(t.sqrt_term, std::sqrt(std::pow(2.0, 5) * T * iota * 4.0), 1e-9);
}
