#include "predrl/predictions.hpp"

#include <algorithm>
#include <cmath>

#include "predrl/rng.hpp"

namespace predrl {

void check_prediction_shape(const PredictionTable& preds, const OptimalProfile& profile) {
    if (preds.horizon() != profile.horizon || preds.states() != profile.num_states ||
        preds.actions() != profile.num_actions) {
        throw InvalidArgument("prediction table shape does not match the mdp");
    }
}

DistillationResult is_eps_distillation(const PredictionTable& preds, const OptimalProfile& profile,
                                       double eps) {
    check_prediction_shape(preds, profile);
    DistillationResult out;
    out.holds = true;
    out.witness = StateTable<int>(profile.horizon, profile.num_states, -1);
    for (int h = 0; h < profile.horizon; ++h) {
        for (int x = 0; x < profile.num_states; ++x) {
            for (int a = 0; a < profile.num_actions; ++a) {
                const double under = std::max(0.0, profile.q_star(h, x, a) - preds(h, x, a));
                if (profile.gap(h, x, a) + under <= eps) {
                    out.witness(h, x) = a;
                    break;
                }
            }
            if (out.witness(h, x) < 0) out.holds = false;
        }
    }
    return out;
}

bool FoolingSet::contains(const Triple& t) const {
    return std::binary_search(members.begin(), members.end(), t);
}

FoolingSet fooling_set(const PredictionTable& preds, const OptimalProfile& profile, double eps1,
                       double eps2) {
    if (!(eps1 > 0.0 && eps2 > eps1)) {
        throw InvalidArgument("fooling_set requires eps2 > eps1 > 0");
    }
    check_prediction_shape(preds, profile);
    FoolingSet f;
    f.eps1 = eps1;
    f.eps2 = eps2;
    for (int h = 0; h < profile.horizon; ++h) {
        for (int x = 0; x < profile.num_states; ++x) {
            for (int a = 0; a < profile.num_actions; ++a) {
                const double over = preds(h, x, a) - profile.q_star(h, x, a);
                const double slack = profile.gap(h, x, a) - eps1;
                const bool misleads = over >= slack && slack >= eps2 - eps1;
                const bool inflated = preds(h, x, a) > profile.v_star(h, x) + eps2;
                if (misleads || inflated) f.members.push_back({h, x, a});
            }
        }
    }
    return f;
}

bool lacks_fooling_optimal_actions(const PredictionTable& preds, const OptimalProfile& profile,
                                   double eps_prime) {
    check_prediction_shape(preds, profile);
    for (int h = 0; h < profile.horizon; ++h) {
        for (int x = 0; x < profile.num_states; ++x) {
            if (profile.num_optimal(h, x) <= 1) continue;
            for (int a = 0; a < profile.num_actions; ++a) {
                if (profile.is_optimal(h, x, a) && preds(h, x, a) > profile.v_star(h, x) + eps_prime) {
                    return false;
                }
            }
        }
    }
    return true;
}

PredictionKind parse_prediction_kind(const std::string& name) {
    if (name == "exact") return PredictionKind::exact;
    if (name == "flat_misleading") return PredictionKind::flat_misleading;
    if (name == "single_wrong_suboptimal") return PredictionKind::single_wrong_suboptimal;
    if (name == "noisy_distillation") return PredictionKind::noisy_distillation;
    if (name == "adversarial_low_optimal") return PredictionKind::adversarial_low_optimal;
    throw InvalidArgument("unknown prediction kind '" + name + "'");
}

std::string to_string(PredictionKind kind) {
    switch (kind) {
        case PredictionKind::exact: return "exact";
        case PredictionKind::flat_misleading: return "flat_misleading";
        case PredictionKind::single_wrong_suboptimal: return "single_wrong_suboptimal";
        case PredictionKind::noisy_distillation: return "noisy_distillation";
        case PredictionKind::adversarial_low_optimal: return "adversarial_low_optimal";
    }
    return "unknown";
}

PredictionTable make_predictions(const PredictionSpec& spec, const OptimalProfile& profile,
                                 std::uint64_t seed) {
    const int S = profile.num_states, A = profile.num_actions, H = profile.horizon;
    const double cap = static_cast<double>(H);
    PredictionTable q = profile.q_star;
    Rng rng(seed);

    switch (spec.kind) {
        case PredictionKind::exact:
            break;

        case PredictionKind::flat_misleading:
            // Every action at (h, x) predicted at the best suboptimal value, so the
            // table cannot separate the optimal action from its closest rival.
            for (int h = 0; h < H; ++h) {
                for (int x = 0; x < S; ++x) {
                    double best_sub = -1.0;
                    for (int a = 0; a < A; ++a) {
                        if (!profile.is_optimal(h, x, a)) best_sub = std::max(best_sub, profile.q_star(h, x, a));
                    }
                    if (best_sub < 0.0) continue;
                    for (int a = 0; a < A; ++a) q(h, x, a) = best_sub;
                }
            }
            break;

        case PredictionKind::single_wrong_suboptimal: {
            std::vector<Triple> sub;
            for (int h = 0; h < H; ++h)
                for (int x = 0; x < S; ++x)
                    for (int a = 0; a < A; ++a)
                        if (!profile.is_optimal(h, x, a)) sub.push_back({h, x, a});
            if (!sub.empty()) {
                const Triple t = sub[rng.below(sub.size())];
                q(t.h, t.x, t.a) = std::min(profile.v_star(t.h, t.x) + 1.0, cap);
            }
            break;
        }

        case PredictionKind::noisy_distillation:
            if (!(spec.eta >= 0.0)) throw InvalidArgument("noisy_distillation: eta must be >= 0");
            for (int h = 0; h < H; ++h) {
                for (int x = 0; x < S; ++x) {
                    const int witness = profile.optimal_action(h, x);
                    for (int a = 0; a < A; ++a) {
                        const double noise = a == witness ? rng.uniform(0.0, spec.eta)
                                                          : rng.uniform(-spec.eta, spec.eta);
                        q(h, x, a) = std::clamp(profile.q_star(h, x, a) + noise, 0.0, cap);
                    }
                }
            }
            break;

        case PredictionKind::adversarial_low_optimal:
            if (!(spec.c >= 0.0)) throw InvalidArgument("adversarial_low_optimal: c must be >= 0");
            for (int h = 0; h < H; ++h)
                for (int x = 0; x < S; ++x)
                    for (int a = 0; a < A; ++a)
                        if (profile.is_optimal(h, x, a)) q(h, x, a) = std::max(0.0, q(h, x, a) - spec.c);
            break;
    }
    return q;
}

}  // namespace predrl
