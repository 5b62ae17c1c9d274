#include "predrl/analysis.hpp"

#include <cmath>
#include <stdexcept>

#include "predrl/io.hpp"

namespace predrl {

ExtendedReal::ExtendedReal(double v) : v_(v) {
    if (!std::isfinite(v)) throw InvalidArgument("ExtendedReal requires a finite value; use infinity()");
}

ExtendedReal ExtendedReal::infinity() {
    ExtendedReal r;
    r.infinite_ = true;
    return r;
}

double ExtendedReal::value() const {
    if (infinite_) throw std::logic_error("value() called on an infinite ExtendedReal");
    return v_;
}

std::string ExtendedReal::str() const { return infinite_ ? "inf" : fmt_real(v_); }

ExtendedReal operator+(const ExtendedReal& a, const ExtendedReal& b) {
    if (a.infinite_ || b.infinite_) return ExtendedReal::infinity();
    return ExtendedReal(a.v_ + b.v_);
}

ExtendedReal operator*(double s, const ExtendedReal& a) {
    if (a.infinite_) return s == 0.0 ? ExtendedReal(0.0) : ExtendedReal::infinity();
    return ExtendedReal(s * a.v_);
}

bool operator<(const ExtendedReal& a, const ExtendedReal& b) {
    if (a.infinite_) return false;
    if (b.infinite_) return true;
    return a.v_ < b.v_;
}

ExtendedReal min(const ExtendedReal& a, const ExtendedReal& b) { return b < a ? b : a; }

namespace {

double iota_of(const OptimalProfile& p, double T) {
    return std::log(static_cast<double>(p.num_states) * p.num_actions * T);
}

// |A_mul| / divisor with 0/0 read as 0.
ExtendedReal a_mul_ratio(std::size_t a_mul, double divisor) {
    if (a_mul == 0) return ExtendedReal(0.0);
    if (divisor <= 0.0) return ExtendedReal::infinity();
    return ExtendedReal(static_cast<double>(a_mul) / divisor);
}

}  // namespace

HardnessReport lambda_cost(const OptimalProfile& p, double T, double lambda,
                           std::optional<double> delta_tilde) {
    if (!(lambda > 0.0 && lambda <= 1.0)) throw InvalidArgument("lambda must lie in (0,1]");
    if (!(T >= 1.0)) throw InvalidArgument("T must be >= 1");
    const double S = p.num_states, A = p.num_actions, H = p.horizon;
    HardnessReport r;
    r.horizon_steps = T;
    r.lambda = lambda;
    r.iota = iota_of(p, T);
    for (double g : p.gap.raw()) {
        if (g > kGapTolerance) r.gap_sum += 1.0 / g;
    }
    r.a_mul = p.a_mul_size();
    // With no positive gap anywhere there is no delta_min; the A_mul term is read as 0.
    const ExtendedReal amul = p.delta_min ? a_mul_ratio(r.a_mul, *p.delta_min) : ExtendedReal(0.0);
    r.a_mul_term = amul.value();
    const double h7i = std::pow(H, 7) * r.iota;
    r.uniform_term = std::sqrt(lambda * T * S * A * std::pow(H, 8) * r.iota);
    r.gap_term = h7i * (ExtendedReal(r.gap_sum) + amul);
    r.lambda_cost = min(ExtendedReal(r.uniform_term), r.gap_term);
    if (delta_tilde) {
        if (!(*delta_tilde >= 0.0)) throw InvalidArgument("delta_tilde must be >= 0");
        r.delta_tilde = delta_tilde;
        r.variant_gap_term = h7i * (ExtendedReal(r.gap_sum) + a_mul_ratio(r.a_mul, *delta_tilde));
        r.variant_cost = min(ExtendedReal(r.uniform_term), r.variant_gap_term);
    }
    return r;
}

LambdaSolution solve_lambda_hat(const OptimalProfile& p, double T, double R) {
    if (!(R > 0.0)) throw InvalidArgument("solve_lambda_hat: R must be > 0");
    const double H = p.horizon;
    const double K = T / H;
    const double lo_end = p.num_states * p.num_actions * H * H * H / K * 1e-6;
    auto ratio = [&](double lam) { return lambda_cost(p, T, lam).lambda_cost.value() / lam; };

    // ratio is decreasing in lambda; a root exists iff ratio(1) <= R <= ratio(lo_end).
    if (ratio(1.0) >= R) return {1.0, ratio(1.0) != R};
    double lo = std::min(lo_end, 1.0);
    if (ratio(lo) <= R) return {lo, ratio(lo) != R};
    double hi = 1.0;
    for (int it = 0; it < 2000 && hi - lo > 0.0; ++it) {
        // Geometric midpoint: the bracket spans several orders of magnitude.
        double mid = std::sqrt(lo * hi);
        if (!(mid > lo && mid < hi)) mid = lo + (hi - lo) / 2.0;
        if (!(mid > lo && mid < hi)) break;
        if (ratio(mid) > R) lo = mid; else hi = mid;
    }
    const double a = std::abs(ratio(lo) - R), b = std::abs(ratio(hi) - R);
    return {a < b ? lo : hi, false};
}

double uniform_branch_lambda(const OptimalProfile& p, double T, double R) {
    const double S = p.num_states, A = p.num_actions, H = p.horizon;
    return T * S * A * std::pow(H, 8) * iota_of(p, T) / (R * R);
}

FoolingTerms fooling_regret_terms(const OptimalProfile& p, const FoolingSet& fooling, double T,
                                  double eps_prime) {
    const double H = p.horizon;
    const double iota = iota_of(p, T);
    FoolingTerms out;
    out.sqrt_term = std::sqrt(std::pow(H, 5) * T * iota * static_cast<double>(fooling.size()));
    out.gap_term = ExtendedReal(0.0);
    const double h4i = std::pow(H, 4) * iota;
    for (const Triple& t : fooling.members) {
        const double d = p.gap(t.h, t.x, t.a) - eps_prime / 2.0;
        if (d <= 0.0) {
            out.gap_term = ExtendedReal::infinity();
            break;
        }
        out.gap_term = out.gap_term + ExtendedReal(h4i / d);
    }
    return out;
}

}  // namespace predrl
