#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "predrl/rng.hpp"

namespace predrl {

enum class RewardModel { bernoulli, deterministic };

struct BanditInstance {
    std::vector<double> means;
    RewardModel model = RewardModel::bernoulli;
    std::uint64_t seed = 0;

    int arms() const { return static_cast<int>(means.size()); }
    double best_mean() const;
    double gap(int arm) const { return best_mean() - means[static_cast<std::size_t>(arm)]; }
    void validate() const;
};

// Action 0 has mean 1, every other arm 1 - delta.
BanditInstance bandit_gap_arms(int arms, double delta, RewardModel model, std::uint64_t seed);

// UCB prefix of floor(lambda T) steps, then greedy play on the predictions
// projected into the current confidence intervals.
class BanditLearner {
public:
    BanditLearner(std::vector<double> predictions, std::int64_t horizon, double lambda, double delta);

    int choose() const;
    void observe(int arm, double reward);

    std::int64_t steps_done() const { return t_; }
    std::int64_t prefix_length() const { return prefix_; }
    std::int64_t pulls(int a) const { return n_[static_cast<std::size_t>(a)]; }
    double mean(int a) const;
    double upper(int a) const;
    double lower(int a) const;
    // max{lower, min{upper, prediction}}.
    double projected(int a) const;
    double radius(int a) const;
    double delta() const { return delta_; }

private:
    std::vector<double> pred_;
    std::int64_t horizon_ = 0;
    std::int64_t prefix_ = 0;
    double delta_ = 0.0;
    double log_inv_delta_ = 0.0;
    std::int64_t t_ = 0;
    std::vector<std::int64_t> n_;
    std::vector<double> sum_;
};

struct BanditRow {
    std::int64_t step = 0;  // 1-based
    int arm = 0;
    double reward = 0.0;
    double inst_gap = 0.0;
    double cum_regret = 0.0;
};

struct BanditRun {
    std::vector<BanditRow> rows;
    std::vector<std::string> warnings;
    double delta = 0.0;
};

// delta defaults to 1/(A T^2).
BanditRun run_bandit(const BanditInstance& instance, const std::vector<double>& predictions,
                     std::int64_t horizon, double lambda, std::optional<double> delta = std::nullopt);

std::string bandit_csv(const BanditRun& run);
inline constexpr const char* kBanditCsvHeader = "step,arm,reward,inst_gap,cum_regret";

}  // namespace predrl
