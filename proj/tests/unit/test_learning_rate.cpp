#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "predrl/learning_rate.hpp"
#include "predrl/rng.hpp"

using namespace predrl;

TEST(StepSize, FirstStepIsOne) {
    for (int H : {1, 2, 5, 10}) {
        EXPECT_DOUBLE_EQ(step_size(1, H), 1.0);
        EXPECT_DOUBLE_EQ(alpha_weight(1, 1, H), 1.0);
    }
}

TEST(AlphaWeight, TwoStepsHorizonTwo) {
    EXPECT_DOUBLE_EQ(step_size(2, 2), 0.75);
    EXPECT_DOUBLE_EQ(alpha_weight(2, 2, 2), 0.75);
    EXPECT_DOUBLE_EQ(alpha_weight(2, 1, 2), 0.25);
    EXPECT_DOUBLE_EQ(alpha_weight(2, 0, 2), 0.0);
}

TEST(AlphaWeight, EmptyHistory) {
    EXPECT_DOUBLE_EQ(alpha_weight(0, 0, 3), 1.0);
    EXPECT_EQ(alpha_weights(0, 3), std::vector<double>{1.0});
}

TEST(AlphaWeight, RejectsBadIndices) {
    EXPECT_THROW(alpha_weight(3, 4, 2), InvalidArgument);
    EXPECT_THROW(alpha_weight(3, -1, 2), InvalidArgument);
    EXPECT_THROW(alpha_weights(-1, 2), InvalidArgument);
}

TEST(AlphaWeight, VectorMatchesProductFormula) {
    for (int H : {1, 2, 5}) {
        for (std::int64_t n : {1, 2, 7, 50, 300}) {
            const auto w = alpha_weights(n, H);
            double total = 0.0;
            for (std::int64_t i = 0; i <= n; ++i) {
                EXPECT_NEAR(w[i], oracle::alpha_product(n, i, H), 1e-15);
                EXPECT_NEAR(w[i], alpha_weight(n, i, H), 1e-15);
                total += w[i];
            }
            EXPECT_NEAR(total, 1.0, 1e-12);
        }
    }
}

TEST(Beta, WithinBonusBand) {
    const double iota = std::log(1000.0), c0 = 2.0;
    for (int H : {1, 2, 5}) {
        WeightedAverage acc;
        for (std::int64_t n = 1; n <= 1000; ++n) {
            acc.push(2.0 * bonus(n, H, iota, c0), H);
            const double base = c0 * std::sqrt(static_cast<double>(H) * H * H * iota / n);
            EXPECT_GE(acc.value, 2.0 * base - 1e-9) << "H=" << H << " n=" << n;
            EXPECT_LE(acc.value, 4.0 * base + 1e-9) << "H=" << H << " n=" << n;
        }
    }
}

TEST(Beta, IncrementalMatchesDirectSum) {
    const double iota = 3.7, c0 = 1.3;
    for (int H : {1, 2, 5}) {
        WeightedAverage acc;
        for (std::int64_t n = 1; n <= 400; ++n) {
            acc.push(2.0 * bonus(n, H, iota, c0), H);
            EXPECT_NEAR(acc.value, beta(n, H, iota, c0), 1e-9);
        }
    }
}

TEST(WeightedAverage, MatchesDirectSum) {
    Rng rng(3);
    for (int H : {1, 2, 5}) {
        WeightedAverage acc;
        std::vector<double> seen;
        for (int n = 1; n <= 200; ++n) {
            const double v = rng.uniform(0.0, 5.0);
            acc.push(v, H);
            seen.push_back(v);
            EXPECT_NEAR(acc.value, oracle::weighted_sum(seen, H), 1e-9);
        }
    }
}

TEST(Clip, Definition) {
    EXPECT_EQ(clip(5.0, 3.0), 5.0);
    EXPECT_EQ(clip(2.0, 3.0), 0.0);
    EXPECT_EQ(clip(3.0, 3.0), 3.0);
    EXPECT_EQ(clip(0.4, 0.0), 0.4);
}

TEST(RangeCell, RunningMinimumOfDirectTerms) {
    Rng rng(11);
    const int H = 3;
    const double iota = 2.0, c0 = 0.2, thr = 0.5;
    RangeCell cell;
    cell.value = H;
    WeightedAverage b;
    std::vector<double> next;
    double expected = H;
    for (std::int64_t n = 1; n <= 300; ++n) {
        b.push(2.0 * bonus(n, H, iota, c0), H);
        const double v = rng.uniform(0.0, H);
        next.push_back(v);
        cell.push(b.value, thr, v, H);
        expected = std::min(expected, clip(beta(n, H, iota, c0), thr) + oracle::weighted_sum(next, H));
        EXPECT_NEAR(cell.value, expected, 1e-9);
    }
}

// Identities of the learning-rate weights.
TEST(AlphaIdentities, ColumnSumsBounded) {
    // sum_{n >= i} alpha_n^i = 1 + 1/H; truncated partial sums stay below it.
    for (int H : {1, 2, 5}) {
        for (std::int64_t i : {1, 3, 20}) {
            double partial = 0.0;
            for (std::int64_t n = i; n <= 20000; ++n) partial += alpha_weight(n, i, H);
            EXPECT_LE(partial, 1.0 + 1.0 / H + 1e-12);
            EXPECT_GE(partial, 1.0);
        }
    }
}

TEST(AlphaIdentities, SquaredSumBound) {
    // sum_i (alpha_n^i)^2 <= 2H / n.
    for (int H : {1, 2, 5}) {
        for (std::int64_t n = 1; n <= 500; ++n) {
            const auto w = alpha_weights(n, H);
            double sq = 0.0;
            for (std::int64_t i = 1; i <= n; ++i) sq += w[i] * w[i];
            EXPECT_LE(sq, 2.0 * H / n + 1e-12);
        }
    }
}

TEST(AlphaIdentities, WeightedInverseRoot) {
    // 1/sqrt(n) <= sum_i alpha_n^i / sqrt(i) <= 2/sqrt(n).
    for (int H : {1, 2, 5}) {
        for (std::int64_t n = 1; n <= 500; ++n) {
            const auto w = alpha_weights(n, H);
            double s = 0.0;
            for (std::int64_t i = 1; i <= n; ++i) s += w[i] / std::sqrt(static_cast<double>(i));
            EXPECT_GE(s, 1.0 / std::sqrt(static_cast<double>(n)) - 1e-12);
            EXPECT_LE(s, 2.0 / std::sqrt(static_cast<double>(n)) + 1e-12);
        }
    }
}

TEST(AlphaIdentities, MaxWeightBound) {
    // max_i alpha_n^i <= 2H / n.
    for (int H : {1, 2, 5}) {
        for (std::int64_t n = 1; n <= 500; ++n) {
            const auto w = alpha_weights(n, H);
            for (std::int64_t i = 1; i <= n; ++i) EXPECT_LE(w[i], 2.0 * H / n + 1e-12);
        }
    }
}
