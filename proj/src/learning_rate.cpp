#include "predrl/learning_rate.hpp"

#include <cmath>
#include <string>

#include "predrl/mdp.hpp"

namespace predrl {

double step_size(std::int64_t n, int horizon) {
    return static_cast<double>(horizon + 1) / static_cast<double>(horizon + n);
}

double alpha_weight(std::int64_t n, std::int64_t i, int horizon) {
    if (i < 0 || n < 0 || i > n) {
        throw InvalidArgument("alpha_weight: need 0 <= i <= n (got n=" + std::to_string(n) +
                              ", i=" + std::to_string(i) + ")");
    }
    if (i == 0) return n == 0 ? 1.0 : 0.0;
    double w = step_size(i, horizon);
    for (std::int64_t j = i + 1; j <= n; ++j) w *= 1.0 - step_size(j, horizon);
    return w;
}

std::vector<double> alpha_weights(std::int64_t n, int horizon) {
    if (n < 0) throw InvalidArgument("alpha_weights: n must be >= 0");
    std::vector<double> w(static_cast<std::size_t>(n) + 1, 0.0);
    if (n == 0) {
        w[0] = 1.0;
        return w;
    }
    // Suffix product of (1 - alpha_j), built from the top down.
    double tail = 1.0;
    for (std::int64_t i = n; i >= 1; --i) {
        w[static_cast<std::size_t>(i)] = step_size(i, horizon) * tail;
        tail *= 1.0 - step_size(i, horizon);
    }
    return w;
}

double bonus(std::int64_t n, int horizon, double iota, double c0) {
    const double h3 = static_cast<double>(horizon) * horizon * horizon;
    return c0 * std::sqrt(h3 * iota / static_cast<double>(n));
}

double beta(std::int64_t n, int horizon, double iota, double c0) {
    if (n == 0) return 0.0;
    const auto w = alpha_weights(n, horizon);
    double acc = 0.0;
    for (std::int64_t i = 1; i <= n; ++i) acc += w[static_cast<std::size_t>(i)] * bonus(i, horizon, iota, c0);
    return 2.0 * acc;
}

}  // namespace predrl
