#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "predrl/table.hpp"

namespace predrl {

// Gaps at or below this are treated as exactly zero.
inline constexpr double kGapTolerance = 1e-12;

class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Finite-horizon episodic MDP with deterministic rewards.
//
// Steps are zero-based throughout the library: h = 0 is the first step and
// h = horizon is the terminal step where every value is 0. All nested arrays
// are ordered [h][x][a] (transitions add a trailing next-state index).
struct TabularMdp {
    int num_states = 0;
    int num_actions = 0;
    int horizon = 0;
    // transitions[h][x][a] is a probability vector over next states.
    ActionTable<std::vector<double>> transitions;
    ActionTable<double> rewards;
    // Start state of episode k is initial_states[k % size] (k zero-based).
    std::vector<int> initial_states;

    int initial_state(std::int64_t episode) const {
        return initial_states[static_cast<std::size_t>(episode % static_cast<std::int64_t>(initial_states.size()))];
    }

    // Throws InvalidArgument describing the first violated invariant.
    void validate() const;
};

// Exact solution of an MDP: optimal values, gaps and optimal-action sets.
struct OptimalProfile {
    int num_states = 0;
    int num_actions = 0;
    int horizon = 0;
    ActionTable<double> q_star;
    StateTable<double> v_star;
    ActionTable<double> gap;
    // Smallest positive gap; absent when every action is optimal everywhere.
    std::optional<double> delta_min;
    // Smallest positive gap at (h, x); absent when all actions there are optimal.
    StateTable<std::optional<double>> delta_min_state;
    // Greedy optimal policy (lowest optimal action index).
    StateTable<int> optimal_action;

    bool is_optimal(int h, int x, int a) const { return gap(h, x, a) <= kGapTolerance; }
    // A_opt_{h,eps}(x): actions whose gap is at most eps.
    std::vector<int> opt_actions(int h, int x, double eps = 0.0) const;
    int num_optimal(int h, int x) const;
    bool in_a_mul(int h, int x, int a) const { return is_optimal(h, x, a) && num_optimal(h, x) > 1; }
    std::size_t a_mul_size() const;
};

struct Step {
    int state = 0;
    int action = 0;
    double reward = 0.0;
};

struct Trajectory {
    std::vector<Step> steps;
    // State reached after the final step's transition (not part of the return).
    int terminal_state = 0;
};

// Deterministic Markov policy: policy(h, x) is the action.
using Policy = StateTable<int>;

OptimalProfile value_iteration(const TabularMdp& mdp);

// V^pi_h(x) for every step, plus the terminal row of zeros at h = horizon.
std::vector<std::vector<double>> policy_value(const TabularMdp& mdp, const Policy& policy);

// Inverse-CDF draw from a probability row.
int sample_next_state(const std::vector<double>& row, double u);

Trajectory simulate_episode(const TabularMdp& mdp, const Policy& policy, std::int64_t episode,
                            std::uint64_t seed);

TabularMdp random_mdp(std::uint64_t seed, int states, int actions, int horizon,
                      double reward_sparsity);

// Single-state one-step instance: action 0 pays 1, every other action 1 - delta.
TabularMdp bandit_gap_instance(int actions, double delta);

}  // namespace predrl
