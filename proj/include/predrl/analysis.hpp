#pragma once

#include <optional>
#include <string>

#include "predrl/mdp.hpp"
#include "predrl/predictions.hpp"

namespace predrl {

// A non-negative real or +infinity, kept apart from floating-point inf so
// that callers must handle the infinite case explicitly.
class ExtendedReal {
public:
    ExtendedReal() = default;
    explicit ExtendedReal(double v);
    static ExtendedReal infinity();

    bool is_infinite() const { return infinite_; }
    // Throws std::logic_error when infinite.
    double value() const;
    std::string str() const;

    friend ExtendedReal operator+(const ExtendedReal& a, const ExtendedReal& b);
    friend ExtendedReal operator*(double s, const ExtendedReal& a);
    friend bool operator<(const ExtendedReal& a, const ExtendedReal& b);
    friend bool operator==(const ExtendedReal& a, const ExtendedReal& b) = default;

private:
    double v_ = 0.0;
    bool infinite_ = false;
};

ExtendedReal min(const ExtendedReal& a, const ExtendedReal& b);

struct HardnessReport {
    double horizon_steps = 0.0;  // T
    double lambda = 0.0;
    double iota = 0.0;
    double gap_sum = 0.0;         // sum of 1/gap over suboptimal triples
    std::size_t a_mul = 0;
    double a_mul_term = 0.0;      // |A_mul| / delta_min, 0 when there is nothing to divide
    double uniform_term = 0.0;    // sqrt(lambda T S A H^8 iota)
    ExtendedReal gap_term;        // H^7 iota (gap_sum + a_mul_term)
    ExtendedReal lambda_cost;
    // Same quantities with a supplied gap lower bound in the A_mul term.
    std::optional<double> delta_tilde;
    ExtendedReal variant_gap_term;
    ExtendedReal variant_cost;
};

// Throws InvalidArgument unless lambda in (0,1] and T >= 1.
HardnessReport lambda_cost(const OptimalProfile& profile, double T, double lambda,
                           std::optional<double> delta_tilde = std::nullopt);

struct LambdaSolution {
    double lambda = 0.0;
    bool boundary = false;  // no interior root; lambda is the nearest bracket end
};

// Solves cost(lambda) / lambda = R by bisection on [S A H^3 / K * 1e-6, 1].
LambdaSolution solve_lambda_hat(const OptimalProfile& profile, double T, double R);

// Inversion of sqrt(lambda T S A H^8 iota) / lambda = R.
double uniform_branch_lambda(const OptimalProfile& profile, double T, double R);

struct FoolingTerms {
    double sqrt_term = 0.0;
    ExtendedReal gap_term;
};

FoolingTerms fooling_regret_terms(const OptimalProfile& profile, const FoolingSet& fooling, double T,
                                  double eps_prime);

}  // namespace predrl
