#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "predrl/analysis.hpp"
#include "predrl/bandit.hpp"
#include "predrl/io.hpp"
#include "predrl/learner.hpp"

namespace predrl {

inline constexpr const char* kLedgerCsvHeader = "episode,cum_regret,inst_regret,delta_hat,n_sigma,n_tau";

struct LedgerRow {
    std::int64_t episode = 0;  // 1-based
    double cum_regret = 0.0;
    double inst_regret = 0.0;
    double delta_hat = 0.0;
    int n_sigma = 0;
    int n_tau = 0;
};

struct RegretLedger {
    std::vector<LedgerRow> rows;
    double final_regret() const { return rows.empty() ? 0.0 : rows.back().cum_regret; }
};

std::string ledger_csv(const RegretLedger& ledger);

// Called once per finished episode; used for tracing and invariant checks.
using EpisodeHook = std::function<void(const Learner&, const EpisodeRecord&)>;

// Runs K episodes and prices every played policy exactly against V*.
RegretLedger run_learner(const TabularMdp& mdp, const OptimalProfile& profile, Learner& learner,
                         const EpisodeHook& hook = {});

// The learner with a pinned zero target error, so it never exploits predictions
// before its range functions reach zero.
LearnerConfig baseline_config(LearnerConfig cfg);

// One JSON object per (episode, step).
std::string trace_line(const EpisodeRecord& rec, int h);

enum class InstanceKind { random, bandit_gap, file };

struct InstanceSpec {
    InstanceKind kind = InstanceKind::random;
    int states = 1, actions = 2, horizon = 1;
    double reward_sparsity = 0.0;
    std::uint64_t seed = 0;
    bool vary_with_seed = false;
    std::optional<double> min_gap;  // resample random instances until delta_min reaches this
    int max_resample = 10000;
    double delta = 0.1;             // bandit_gap
    std::string path;               // file
};

enum class AlgorithmKind { learner, baseline_optimistic, bandit };

struct AlgorithmSpec {
    std::string name;
    AlgorithmKind kind = AlgorithmKind::learner;
    PredictionSpec predictions;
    std::optional<std::string> predictions_path;
    LearnerConfig learner;  // learner / baseline (episodes filled from the experiment)
    double bandit_lambda = 1.0;
    std::optional<double> bandit_delta;
    RewardModel reward_model = RewardModel::bernoulli;
};

struct AnalysisSpec {
    double lambda = 0.5;
    double distillation_eps = 0.0;
    double eps_prime = 0.1;
    std::optional<double> delta_tilde;
};

struct ExperimentConfig {
    std::string name = "experiment";
    InstanceSpec instance;
    std::int64_t episodes = 0;  // K for MDP algorithms, T for the bandit
    std::vector<std::uint64_t> seeds{1};
    std::vector<std::int64_t> checkpoints;
    std::vector<AlgorithmSpec> algorithms;
    AnalysisSpec analysis;
    std::string output_dir = "runs/out";
    bool trace = false;
    bool check_invariants = false;
};

// Errors name the offending JSON path, e.g. "algorithms[1].schedule.kind".
ExperimentConfig parse_config(const Json& j, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path);

TabularMdp build_instance(const InstanceSpec& spec, std::uint64_t run_seed);

PredictionTable build_predictions(const AlgorithmSpec& alg, const OptimalProfile& profile,
                                  std::uint64_t run_seed);

struct RunResult {
    std::string algorithm;
    std::uint64_t seed = 0;
    std::vector<double> cum_regret;  // per episode (or step for the bandit)
    std::vector<std::string> warnings;
    std::int64_t invariant_violations = 0;
    std::int64_t empty_set_guards = 0;
};

struct ExperimentResult {
    std::vector<RunResult> runs;  // algorithm-major, seed order
    Json summary;
};

// Writes <algorithm>__seed<N>.csv per run, summary.json and plotdata.csv under
// the output directory. jobs <= 1 runs sequentially.
ExperimentResult run_experiment(const ExperimentConfig& cfg, int jobs = 1);

struct PlotRow {
    std::string algorithm;
    std::uint64_t seed = 0;
    std::int64_t episode = 0;
    double cum_regret = 0.0;
};

// Checkpoints past the run length are clipped to it with a warning.
std::vector<PlotRow> emit_plot_data(const std::vector<RunResult>& runs,
                                    const std::vector<std::int64_t>& checkpoints,
                                    std::vector<std::string>* warnings = nullptr);
std::string plot_csv(const std::vector<PlotRow>& rows);

// Reads every per-run CSV in a run directory back into RunResults.
std::vector<RunResult> load_run_dir(const std::string& dir);

std::vector<std::int64_t> default_checkpoints(std::int64_t length, int count = 10);

Json hardness_json(const HardnessReport& r);
Json profile_json(const OptimalProfile& p);
Json classify_predictions(const PredictionTable& preds, const OptimalProfile& profile,
                          const AnalysisSpec& spec);

}  // namespace predrl
