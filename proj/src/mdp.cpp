#include "predrl/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "predrl/rng.hpp"

namespace predrl {

namespace {

std::string where(int h, int x, int a) {
    return "[" + std::to_string(h) + "][" + std::to_string(x) + "][" + std::to_string(a) + "]";
}

double expected_next(const std::vector<double>& row, const std::vector<double>& next_values) {
    double acc = 0.0;
    for (std::size_t y = 0; y < row.size(); ++y) acc += row[y] * next_values[y];
    return acc;
}

}  // namespace

void TabularMdp::validate() const {
    if (num_states < 1 || num_actions < 1 || horizon < 1) {
        throw InvalidArgument("mdp dimensions must be positive");
    }
    if (rewards.horizon() != horizon || rewards.states() != num_states ||
        rewards.actions() != num_actions) {
        throw InvalidArgument("reward table shape does not match mdp dimensions");
    }
    if (transitions.horizon() != horizon || transitions.states() != num_states ||
        transitions.actions() != num_actions) {
        throw InvalidArgument("transition table shape does not match mdp dimensions");
    }
    if (initial_states.empty()) throw InvalidArgument("initial_states must not be empty");
    for (int x0 : initial_states) {
        if (x0 < 0 || x0 >= num_states) throw InvalidArgument("initial state out of range");
    }
    for (int h = 0; h < horizon; ++h) {
        for (int x = 0; x < num_states; ++x) {
            for (int a = 0; a < num_actions; ++a) {
                const double r = rewards(h, x, a);
                if (!(r >= 0.0 && r <= 1.0)) {
                    throw InvalidArgument("reward" + where(h, x, a) + " outside [0,1]");
                }
                const auto& row = transitions(h, x, a);
                if (static_cast<int>(row.size()) != num_states) {
                    throw InvalidArgument("transition row" + where(h, x, a) + " has wrong length");
                }
                double total = 0.0;
                for (double p : row) {
                    if (!(p >= 0.0)) {
                        throw InvalidArgument("negative transition probability" + where(h, x, a));
                    }
                    total += p;
                }
                if (std::abs(total - 1.0) > 1e-12) {
                    throw InvalidArgument("transition row" + where(h, x, a) + " does not sum to 1");
                }
            }
        }
    }
}

std::vector<int> OptimalProfile::opt_actions(int h, int x, double eps) const {
    std::vector<int> out;
    const double limit = std::max(eps, kGapTolerance);
    for (int a = 0; a < num_actions; ++a) {
        if (gap(h, x, a) <= limit) out.push_back(a);
    }
    return out;
}

int OptimalProfile::num_optimal(int h, int x) const {
    int n = 0;
    for (int a = 0; a < num_actions; ++a) n += is_optimal(h, x, a) ? 1 : 0;
    return n;
}

std::size_t OptimalProfile::a_mul_size() const {
    std::size_t n = 0;
    for (int h = 0; h < horizon; ++h) {
        for (int x = 0; x < num_states; ++x) {
            const int m = num_optimal(h, x);
            if (m > 1) n += static_cast<std::size_t>(m);
        }
    }
    return n;
}

OptimalProfile value_iteration(const TabularMdp& mdp) {
    const int S = mdp.num_states, A = mdp.num_actions, H = mdp.horizon;
    OptimalProfile p;
    p.num_states = S;
    p.num_actions = A;
    p.horizon = H;
    p.q_star = ActionTable<double>(H, S, A, 0.0);
    p.v_star = StateTable<double>(H, S, 0.0);
    p.gap = ActionTable<double>(H, S, A, 0.0);
    p.delta_min_state = StateTable<std::optional<double>>(H, S);
    p.optimal_action = StateTable<int>(H, S, 0);

    std::vector<double> next(static_cast<std::size_t>(S), 0.0);
    for (int h = H - 1; h >= 0; --h) {
        std::vector<double> current(static_cast<std::size_t>(S), 0.0);
        for (int x = 0; x < S; ++x) {
            for (int a = 0; a < A; ++a) {
                p.q_star(h, x, a) = mdp.rewards(h, x, a) + expected_next(mdp.transitions(h, x, a), next);
            }
            const int best = argmax_lowest(p.q_star.row(h, x));
            p.optimal_action(h, x) = best;
            p.v_star(h, x) = p.q_star(h, x, best);
            current[static_cast<std::size_t>(x)] = p.v_star(h, x);
        }
        next = std::move(current);
    }

    for (int h = 0; h < H; ++h) {
        for (int x = 0; x < S; ++x) {
            for (int a = 0; a < A; ++a) {
                double g = p.v_star(h, x) - p.q_star(h, x, a);
                if (g <= kGapTolerance) g = std::max(g, 0.0);
                p.gap(h, x, a) = g;
                if (g > kGapTolerance) {
                    auto& local = p.delta_min_state(h, x);
                    local = local ? std::min(*local, g) : g;
                    p.delta_min = p.delta_min ? std::min(*p.delta_min, g) : g;
                }
            }
        }
    }
    return p;
}

std::vector<std::vector<double>> policy_value(const TabularMdp& mdp, const Policy& policy) {
    const int S = mdp.num_states, H = mdp.horizon;
    std::vector<std::vector<double>> v(static_cast<std::size_t>(H) + 1,
                                       std::vector<double>(static_cast<std::size_t>(S), 0.0));
    for (int h = H - 1; h >= 0; --h) {
        for (int x = 0; x < S; ++x) {
            const int a = policy(h, x);
            v[h][x] = mdp.rewards(h, x, a) + expected_next(mdp.transitions(h, x, a), v[h + 1]);
        }
    }
    return v;
}

int sample_next_state(const std::vector<double>& row, double u) {
    double cumulative = 0.0;
    int last_positive = 0;
    for (std::size_t y = 0; y < row.size(); ++y) {
        if (row[y] <= 0.0) continue;
        cumulative += row[y];
        last_positive = static_cast<int>(y);
        if (u < cumulative) return last_positive;
    }
    // Rounding left u above the accumulated mass.
    return last_positive;
}

Trajectory simulate_episode(const TabularMdp& mdp, const Policy& policy, std::int64_t episode,
                            std::uint64_t seed) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(episode)));
    Trajectory t;
    t.steps.reserve(static_cast<std::size_t>(mdp.horizon));
    int x = mdp.initial_state(episode);
    for (int h = 0; h < mdp.horizon; ++h) {
        const int a = policy(h, x);
        t.steps.push_back({x, a, mdp.rewards(h, x, a)});
        x = sample_next_state(mdp.transitions(h, x, a), rng.uniform());
    }
    t.terminal_state = x;
    return t;
}

TabularMdp random_mdp(std::uint64_t seed, int states, int actions, int horizon,
                      double reward_sparsity) {
    if (states < 1 || actions < 1 || horizon < 1) {
        throw InvalidArgument("random_mdp: dimensions must be at least 1");
    }
    if (!(reward_sparsity >= 0.0 && reward_sparsity <= 1.0)) {
        throw InvalidArgument("random_mdp: reward_sparsity must lie in [0,1]");
    }
    Rng rng(seed);
    TabularMdp m;
    m.num_states = states;
    m.num_actions = actions;
    m.horizon = horizon;
    m.transitions = ActionTable<std::vector<double>>(horizon, states, actions);
    m.rewards = ActionTable<double>(horizon, states, actions, 0.0);
    for (int h = 0; h < horizon; ++h) {
        for (int x = 0; x < states; ++x) {
            for (int a = 0; a < actions; ++a) {
                std::vector<double> row(static_cast<std::size_t>(states));
                double total = 0.0;
                for (auto& p : row) {
                    // Shift away from zero so the normalizer is never degenerate.
                    p = rng.uniform() + 1e-9;
                    total += p;
                }
                for (auto& p : row) p /= total;
                // Absorb rounding into the largest entry so the row sums to 1.
                double sum = 0.0;
                for (double p : row) sum += p;
                auto big = std::max_element(row.begin(), row.end());
                *big += 1.0 - sum;
                m.transitions(h, x, a) = std::move(row);

                const double r = rng.uniform();
                const bool zeroed = rng.uniform() < reward_sparsity;
                m.rewards(h, x, a) = zeroed ? 0.0 : r;
            }
        }
    }
    m.initial_states.resize(static_cast<std::size_t>(states));
    for (int x = 0; x < states; ++x) m.initial_states[static_cast<std::size_t>(x)] = x;
    return m;
}

TabularMdp bandit_gap_instance(int actions, double delta) {
    if (actions < 2) throw InvalidArgument("bandit_gap_instance: need at least 2 actions");
    if (!(delta > 0.0 && delta < 1.0)) {
        throw InvalidArgument("bandit_gap_instance: delta must lie in (0,1)");
    }
    TabularMdp m;
    m.num_states = 1;
    m.num_actions = actions;
    m.horizon = 1;
    m.transitions = ActionTable<std::vector<double>>(1, 1, actions, std::vector<double>{1.0});
    m.rewards = ActionTable<double>(1, 1, actions, 1.0 - delta);
    m.rewards(0, 0, 0) = 1.0;
    m.initial_states = {0};
    return m;
}

}  // namespace predrl
