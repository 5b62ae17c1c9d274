#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "predrl/learning_rate.hpp"
#include "predrl/mdp.hpp"
#include "predrl/predictions.hpp"

namespace predrl {

enum class ScheduleKind { delta_const, delta_incr };

struct ScheduleConfig {
    ScheduleKind kind = ScheduleKind::delta_const;
    double regret_budget = 0.0;    // delta_const: R
    double lambda = 1.0;           // delta_incr
    double delta_min_lower = 0.0;  // delta_incr: lower bound on the smallest gap
};

// Source of the gap level used when clipping bonuses in the clipped ranges.
enum class ClipMode { oracle, constant, disabled };

struct LearnerConfig {
    std::int64_t episodes = 0;
    ScheduleConfig schedule;
    double c0 = 2.0;
    ClipMode clip_mode = ClipMode::oracle;
    // Effective gap level for clipping; the threshold is clip_delta / (4 H^2).
    // In oracle mode the caller fills it from the optimal profile.
    double clip_delta = 0.0;
    std::uint64_t seed = 0;
    // Keep every visit's next-step range snapshots for direct-sum checks.
    bool record_history = false;
};

// Throws InvalidArgument on out-of-range fields.
void validate(const LearnerConfig& cfg);

// Sets clip_delta according to clip_mode (oracle reads the smallest gap, 0 when absent).
LearnerConfig resolve_clip(LearnerConfig cfg, const OptimalProfile& profile);

ClipMode parse_clip_mode(const std::string& name);

// A range function family sharing one bonus clip threshold.
struct RangeChain {
    double clip_threshold = 0.0;
    ActionTable<RangeCell> q;
    StateTable<double> v;
};

struct VisitRecord {
    double ran_next = 0.0;
    double clip_next = 0.0;
    double sched_next = 0.0;
};

// Every table the main algorithm maintains. Copyable so that consecutive
// episodes can be compared by the invariant checker.
struct LearnerState {
    int num_states = 0;
    int num_actions = 0;
    int horizon = 0;
    std::int64_t episodes_done = 0;
    double iota = 0.0;

    ActionTable<std::int64_t> visits;
    ActionTable<double> q_bar, q_und, q_bar_raw, q_und_raw;
    StateTable<double> v_bar, v_und;
    ActionTable<double> r_bar, q_til;
    StateTable<double> v_til;

    ActionTable<unsigned char> active;
    StateTable<int> active_count;

    ActionTable<WeightedAverage> beta;
    RangeChain ran;    // unclipped range
    RangeChain clip;   // bonuses clipped at clip_delta / (4H^2)
    RangeChain sched;  // bonuses clipped at delta_min_lower / (4H^2), feeds delta_incr
    ActionTable<double> frozen;        // last clipped range at an exploring visit
    ActionTable<double> frozen_sched;  // same for the schedule chain

    double delta_hat = 0.0;
    std::int64_t empty_set_guards = 0;

    bool is_single(int h, int x) const { return active_count(h, x) == 1; }
    bool is_active(int h, int x, int a) const { return active(h, x, a) != 0; }
};

enum class Branch : unsigned char { single, exploit, explore };
const char* to_string(Branch b);

struct PolicyChoice {
    Policy policy;
    StateTable<Branch> branch;
};

struct StepInfo {
    bool single = false;  // state already had one active action this episode
    int next_free = 0;    // first later step whose state is not single (H when none)
    bool tau = false;
    bool sigma = false;
    Branch branch = Branch::explore;
};

struct EpisodeContext {
    const Trajectory* trajectory = nullptr;
    std::vector<StepInfo> steps;
    double delta_hat = 0.0;
};

struct EpisodeRecord {
    std::int64_t episode = 0;
    Trajectory trajectory;
    Policy policy;
    std::vector<StepInfo> steps;
    double delta_hat = 0.0;
};

class Learner {
public:
    Learner(int states, int actions, int horizon, const PredictionTable& predictions,
            LearnerConfig cfg);

    const LearnerConfig& config() const { return cfg_; }
    const LearnerState& state() const { return st_; }
    // Direct access for crafted-state tests.
    LearnerState& mutable_state() { return st_; }

    // g_h(d) = C1 (1 + 1/H)^{4(H - h)} d with zero-based h.
    double gap_threshold(int h, double d) const { return g_scale_[static_cast<std::size_t>(h)] * d; }
    double c1() const { return c1_; }

    PolicyChoice select_policy() const;
    EpisodeContext observe(const Trajectory& trajectory, const PolicyChoice& choice) const;
    void update_confidence(const EpisodeContext& ctx);
    void update_action_sets();
    void update_predictions(const EpisodeContext& ctx);
    void update_ranges(const EpisodeContext& ctx);
    void update_schedule();

    EpisodeRecord run_episode(const TabularMdp& mdp);

    // Next value delta_incr would produce from the current frozen tables.
    double delta_incr_value() const;

    const std::vector<VisitRecord>& history(int h, int x, int a) const;

private:
    double next_value(const StateTable<double>& v, const Trajectory& t, int next_step) const;

    LearnerConfig cfg_;
    LearnerState st_;
    double c1_ = 0.0;
    std::vector<double> g_scale_;
    ActionTable<std::vector<VisitRecord>> history_;
};

// Exact invariants. check_state inspects one snapshot; check_transition
// compares the snapshots before and after one episode. Each returns
// human-readable violation descriptions (empty when everything holds).
std::vector<std::string> check_state(const LearnerState& s);
std::vector<std::string> check_transition(const LearnerState& before, const LearnerState& after,
                                          ScheduleKind schedule);

// High-probability events, evaluated against the true solution.
struct EventReport {
    bool confidence_q = true;       // Q_bar >= Q* >= Q_und
    bool confidence_v = true;       // V_bar >= V* >= V_und
    bool optimal_retained = true;   // optimal actions stay active
    bool range_dominates = true;    // RanQ >= Q_bar - Q_und, RanV >= V_bar - V_und
    bool clip_lower_bound = true;   // ClipQ >= RanQ - dmin/(4H), same for V
    bool frozen_gap_bound = true;   // max{Frz/(2H), dmin/(4H^2)} >= gap/(8H)

    bool all() const {
        return confidence_q && confidence_v && optimal_retained && range_dominates &&
               clip_lower_bound && frozen_gap_bound;
    }
    void merge(const EventReport& o);
};

// Every event except the frozen gap bound, which only applies at the end of a run.
EventReport check_events(const LearnerState& s, const OptimalProfile& profile, double tol = 1e-9);
EventReport check_frozen_gap(const LearnerState& s, const OptimalProfile& profile, double tol = 1e-9);

}  // namespace predrl
