#include "predrl/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "predrl/io.hpp"
#include "predrl/mdp.hpp"

namespace predrl {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double BanditInstance::best_mean() const { return *std::max_element(means.begin(), means.end()); }

void BanditInstance::validate() const {
    if (means.empty()) throw InvalidArgument("bandit needs at least one arm");
    for (double m : means) {
        if (!(m >= 0.0 && m <= 1.0)) throw InvalidArgument("bandit means must lie in [0,1]");
    }
}

BanditInstance bandit_gap_arms(int arms, double delta, RewardModel model, std::uint64_t seed) {
    if (arms < 2) throw InvalidArgument("bandit_gap_arms: need at least 2 arms");
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("bandit_gap_arms: delta must lie in (0,1)");
    BanditInstance b;
    b.means.assign(static_cast<std::size_t>(arms), 1.0 - delta);
    b.means[0] = 1.0;
    b.model = model;
    b.seed = seed;
    return b;
}

BanditLearner::BanditLearner(std::vector<double> predictions, std::int64_t horizon, double lambda,
                             double delta)
    : pred_(std::move(predictions)), horizon_(horizon), delta_(delta) {
    if (pred_.empty()) throw InvalidArgument("bandit predictions must not be empty");
    if (horizon_ < 0) throw InvalidArgument("bandit horizon must be >= 0");
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidArgument("bandit lambda must lie in [0,1]");
    if (!(delta_ > 0.0 && delta_ < 1.0)) throw InvalidArgument("bandit delta must lie in (0,1)");
    prefix_ = static_cast<std::int64_t>(std::floor(lambda * static_cast<double>(horizon_)));
    log_inv_delta_ = std::log(1.0 / delta_);
    n_.assign(pred_.size(), 0);
    sum_.assign(pred_.size(), 0.0);
}

double BanditLearner::mean(int a) const {
    const auto i = static_cast<std::size_t>(a);
    return n_[i] == 0 ? 0.0 : sum_[i] / static_cast<double>(n_[i]);
}

double BanditLearner::radius(int a) const {
    const auto n = n_[static_cast<std::size_t>(a)];
    return n == 0 ? kInf : std::sqrt(2.0 * log_inv_delta_ / static_cast<double>(n));
}

double BanditLearner::upper(int a) const {
    return n_[static_cast<std::size_t>(a)] == 0 ? kInf : mean(a) + radius(a);
}

double BanditLearner::lower(int a) const {
    return n_[static_cast<std::size_t>(a)] == 0 ? -kInf : mean(a) - radius(a);
}

double BanditLearner::projected(int a) const {
    return std::max(lower(a), std::min(upper(a), pred_[static_cast<std::size_t>(a)]));
}

int BanditLearner::choose() const {
    const int A = static_cast<int>(pred_.size());
    const bool ucb_phase = t_ + 1 <= prefix_;
    int best = 0;
    double best_val = ucb_phase ? upper(0) : projected(0);
    for (int a = 1; a < A; ++a) {
        const double v = ucb_phase ? upper(a) : projected(a);
        if (v > best_val) {
            best = a;
            best_val = v;
        }
    }
    return best;
}

void BanditLearner::observe(int arm, double reward) {
    const auto i = static_cast<std::size_t>(arm);
    ++n_[i];
    sum_[i] += reward;
    ++t_;
}

BanditRun run_bandit(const BanditInstance& instance, const std::vector<double>& predictions,
                     std::int64_t horizon, double lambda, std::optional<double> delta) {
    instance.validate();
    const int A = instance.arms();
    if (static_cast<int>(predictions.size()) != A) {
        throw InvalidArgument("bandit predictions must have one entry per arm");
    }
    BanditRun run;
    const double T = static_cast<double>(std::max<std::int64_t>(horizon, 1));
    run.delta = delta.value_or(1.0 / (A * T * T));
    if (!(lambda > A / T && lambda <= 1.0)) {
        run.warnings.push_back("lambda outside (A/T, 1]; running anyway");
    }
    BanditLearner learner(predictions, horizon, lambda, run.delta);
    Rng rng(instance.seed);
    const double best = instance.best_mean();
    double cum = 0.0;
    run.rows.reserve(static_cast<std::size_t>(horizon));
    for (std::int64_t t = 1; t <= horizon; ++t) {
        const int arm = learner.choose();
        const double mu = instance.means[static_cast<std::size_t>(arm)];
        const double reward = instance.model == RewardModel::bernoulli ? (rng.bernoulli(mu) ? 1.0 : 0.0) : mu;
        learner.observe(arm, reward);
        const double gap = best - mu;
        cum += gap;
        run.rows.push_back({t, arm, reward, gap, cum});
    }
    return run;
}

std::string bandit_csv(const BanditRun& run) {
    std::string out = kBanditCsvHeader;
    out += '\n';
    for (const auto& r : run.rows) {
        out += std::to_string(r.step);
        out += ',';
        out += std::to_string(r.arm);
        out += ',';
        out += fmt_real(r.reward);
        out += ',';
        out += fmt_real(r.inst_gap);
        out += ',';
        out += fmt_real(r.cum_regret);
        out += '\n';
    }
    return out;
}

}  // namespace predrl
