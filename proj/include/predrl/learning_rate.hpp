#pragma once

#include <cstdint>
#include <vector>

namespace predrl {

// alpha_n = (H+1)/(H+n), n >= 1.
double step_size(std::int64_t n, int horizon);

// Weight of the i-th update after n updates (i = 0 is the initial value).
// Throws InvalidArgument unless 0 <= i <= n.
double alpha_weight(std::int64_t n, std::int64_t i, int horizon);

// All weights alpha_n^0..alpha_n^n in O(n).
std::vector<double> alpha_weights(std::int64_t n, int horizon);

// b_n = c0 * sqrt(H^3 iota / n).
double bonus(std::int64_t n, int horizon, double iota, double c0);

// beta_n = 2 sum_i alpha_n^i b_i, evaluated from the weights directly.
double beta(std::int64_t n, int horizon, double iota, double c0);

// Running value of sum_i alpha_n^i v_i, updated one term at a time:
// S_n = (1 - alpha_n) S_{n-1} + alpha_n v_n.
struct WeightedAverage {
    double value = 0.0;
    std::int64_t count = 0;

    void push(double v, int horizon) {
        ++count;
        const double a = step_size(count, horizon);
        value = (1.0 - a) * value + a * v;
    }
};

// clip(x, y) = x when x >= y, else 0.
inline double clip(double x, double y) { return x >= y ? x : 0.0; }

// One (h, x, a) cell of a range-style function: the running minimum of
// clip(beta_n, threshold) + sum_i alpha_n^i v_i, starting from H before any visit.
struct RangeCell {
    WeightedAverage next;
    double value = 0.0;

    void push(double beta_n, double clip_threshold, double next_value, int horizon) {
        next.push(next_value, horizon);
        const double term = clip(beta_n, clip_threshold) + next.value;
        if (term < value) value = term;
    }
};

}  // namespace predrl
