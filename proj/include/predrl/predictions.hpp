#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "predrl/mdp.hpp"

namespace predrl {

// Q~_h(x,a) supplied to the learner before interaction. Any finite reals are
// accepted; the generators below keep entries inside [0, H].
using PredictionTable = ActionTable<double>;

struct Triple {
    int h = 0;
    int x = 0;
    int a = 0;
    friend bool operator==(const Triple&, const Triple&) = default;
    friend auto operator<=>(const Triple&, const Triple&) = default;
};

struct DistillationResult {
    bool holds = false;
    // Lowest-index witness action per (h, x), or -1 when none qualifies.
    StateTable<int> witness;
};

DistillationResult is_eps_distillation(const PredictionTable& preds, const OptimalProfile& profile,
                                       double eps);

struct FoolingSet {
    double eps1 = 0.0;
    double eps2 = 0.0;
    std::vector<Triple> members;  // sorted by (h, x, a)

    bool contains(const Triple& t) const;
    std::size_t size() const { return members.size(); }
};

// Throws InvalidArgument unless eps2 > eps1 > 0.
FoolingSet fooling_set(const PredictionTable& preds, const OptimalProfile& profile, double eps1,
                       double eps2);

bool lacks_fooling_optimal_actions(const PredictionTable& preds, const OptimalProfile& profile,
                                   double eps_prime);

enum class PredictionKind {
    exact,
    flat_misleading,
    single_wrong_suboptimal,
    noisy_distillation,
    adversarial_low_optimal,
};

struct PredictionSpec {
    PredictionKind kind = PredictionKind::exact;
    double eta = 0.0;  // noisy_distillation noise scale
    double c = 0.0;    // adversarial_low_optimal shift
};

PredictionKind parse_prediction_kind(const std::string& name);
std::string to_string(PredictionKind kind);

PredictionTable make_predictions(const PredictionSpec& spec, const OptimalProfile& profile,
                                 std::uint64_t seed);

void check_prediction_shape(const PredictionTable& preds, const OptimalProfile& profile);

}  // namespace predrl
