#include "predrl/learner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace predrl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

RangeChain make_chain(int H, int S, int A, double clip_delta) {
    RangeChain c;
    const double h = static_cast<double>(H);
    c.clip_threshold = clip_delta / (4.0 * h * h);
    RangeCell init;
    init.value = h;
    c.q = ActionTable<RangeCell>(H, S, A, init);
    c.v = StateTable<double>(H, S, h);
    return c;
}

std::string cell(const char* name, int h, int x, int a = -1) {
    std::ostringstream os;
    os << name << "[h=" << h << ",x=" << x;
    if (a >= 0) os << ",a=" << a;
    os << "]";
    return os.str();
}

// Lowest-index argmax of f(a) over the active actions at (h, x).
template <typename F>
int active_argmax(const LearnerState& s, int h, int x, F&& f) {
    int best = -1;
    double best_val = -kInf;
    for (int a = 0; a < s.num_actions; ++a) {
        if (!s.is_active(h, x, a)) continue;
        const double v = f(a);
        if (best < 0 || v > best_val) {
            best = a;
            best_val = v;
        }
    }
    return best;
}

}  // namespace

void validate(const LearnerConfig& cfg) {
    if (cfg.episodes < 0) throw InvalidArgument("episodes must be >= 0");
    if (!(cfg.c0 > 0.0)) throw InvalidArgument("c0 must be > 0");
    if (!(cfg.clip_delta >= 0.0)) throw InvalidArgument("clip delta must be >= 0");
    const auto& s = cfg.schedule;
    if (s.kind == ScheduleKind::delta_const && !(s.regret_budget >= 0.0)) {
        throw InvalidArgument("delta_const regret budget must be >= 0");
    }
    if (s.kind == ScheduleKind::delta_incr) {
        if (!(s.lambda > 0.0 && s.lambda <= 1.0)) {
            throw InvalidArgument("delta_incr lambda must lie in (0,1]");
        }
        if (!(s.delta_min_lower >= 0.0)) throw InvalidArgument("delta_min_lower must be >= 0");
    }
}

LearnerConfig resolve_clip(LearnerConfig cfg, const OptimalProfile& profile) {
    switch (cfg.clip_mode) {
        case ClipMode::oracle: cfg.clip_delta = profile.delta_min.value_or(0.0); break;
        case ClipMode::constant: break;
        case ClipMode::disabled: cfg.clip_delta = 0.0; break;
    }
    return cfg;
}

ClipMode parse_clip_mode(const std::string& name) {
    if (name == "oracle") return ClipMode::oracle;
    if (name == "constant") return ClipMode::constant;
    if (name == "disabled") return ClipMode::disabled;
    throw InvalidArgument("unknown clip mode '" + name + "'");
}

const char* to_string(Branch b) {
    switch (b) {
        case Branch::single: return "single";
        case Branch::exploit: return "exploit";
        case Branch::explore: return "explore";
    }
    return "?";
}

Learner::Learner(int states, int actions, int horizon, const PredictionTable& predictions,
                 LearnerConfig cfg)
    : cfg_(cfg) {
    if (states < 1 || actions < 1 || horizon < 1) throw InvalidArgument("learner dimensions must be >= 1");
    if (predictions.horizon() != horizon || predictions.states() != states ||
        predictions.actions() != actions) {
        throw InvalidArgument("prediction table shape does not match the learner");
    }
    validate(cfg_);
    const int S = states, A = actions, H = horizon;
    const double h = static_cast<double>(H);
    st_.num_states = S;
    st_.num_actions = A;
    st_.horizon = H;
    const double total_steps = static_cast<double>(std::max<std::int64_t>(cfg_.episodes, 1)) * h;
    st_.iota = std::log(static_cast<double>(S) * A * total_steps);

    st_.visits = ActionTable<std::int64_t>(H, S, A, 0);
    st_.q_bar = ActionTable<double>(H, S, A, h);
    st_.q_bar_raw = ActionTable<double>(H, S, A, h);
    st_.q_und = ActionTable<double>(H, S, A, 0.0);
    st_.q_und_raw = ActionTable<double>(H, S, A, 0.0);
    st_.v_bar = StateTable<double>(H, S, h);
    st_.v_und = StateTable<double>(H, S, 0.0);
    st_.r_bar = ActionTable<double>(H, S, A, h);
    st_.q_til = predictions;
    st_.v_til = StateTable<double>(H, S, 0.0);
    for (int hh = 0; hh < H; ++hh) {
        for (int x = 0; x < S; ++x) {
            auto row = predictions.row(hh, x);
            st_.v_til(hh, x) = *std::max_element(row.begin(), row.end());
        }
    }
    st_.active = ActionTable<unsigned char>(H, S, A, 1);
    st_.active_count = StateTable<int>(H, S, A);
    st_.beta = ActionTable<WeightedAverage>(H, S, A);
    st_.ran = make_chain(H, S, A, 0.0);
    st_.clip = make_chain(H, S, A, cfg_.clip_delta);
    st_.sched = make_chain(H, S, A, cfg_.schedule.delta_min_lower);
    st_.frozen = ActionTable<double>(H, S, A, h);
    st_.frozen_sched = ActionTable<double>(H, S, A, h);

    if (cfg_.schedule.kind == ScheduleKind::delta_const) {
        st_.delta_hat = cfg_.schedule.regret_budget / (static_cast<double>(std::max<std::int64_t>(cfg_.episodes, 1)) * h);
    } else {
        st_.delta_hat = 0.0;
    }

    const double c2 = 8.0 * cfg_.c0;
    c1_ = 32.0 * std::numbers::e * std::numbers::e * c2 * c2;
    g_scale_.resize(static_cast<std::size_t>(H));
    for (int hh = 0; hh < H; ++hh) {
        g_scale_[static_cast<std::size_t>(hh)] = c1_ * std::pow(1.0 + 1.0 / h, 4.0 * (H - hh));
    }
    if (cfg_.record_history) history_ = ActionTable<std::vector<VisitRecord>>(H, S, A);
}

PolicyChoice Learner::select_policy() const {
    const int S = st_.num_states, H = st_.horizon;
    PolicyChoice out{Policy(H, S, 0), StateTable<Branch>(H, S, Branch::explore)};
    for (int h = 0; h < H; ++h) {
        const double g = gap_threshold(h, st_.delta_hat);
        for (int x = 0; x < S; ++x) {
            int a;
            Branch b;
            if (st_.is_single(h, x)) {
                b = Branch::single;
                a = active_argmax(st_, h, x, [](int) { return 0.0; });
            } else if (st_.ran.v(h, x) <= g) {
                b = Branch::exploit;
                a = active_argmax(st_, h, x, [&](int a2) {
                    return std::max(st_.q_til(h, x, a2), st_.q_und(h, x, a2));
                });
            } else {
                b = Branch::explore;
                a = active_argmax(st_, h, x, [&](int a2) { return st_.q_bar(h, x, a2) - st_.q_und(h, x, a2); });
            }
            out.policy(h, x) = a;
            out.branch(h, x) = b;
        }
    }
    return out;
}

EpisodeContext Learner::observe(const Trajectory& trajectory, const PolicyChoice& choice) const {
    const int H = st_.horizon;
    EpisodeContext ctx;
    ctx.trajectory = &trajectory;
    ctx.delta_hat = st_.delta_hat;
    ctx.steps.resize(static_cast<std::size_t>(H));
    for (int h = 0; h < H; ++h) {
        const int x = trajectory.steps[static_cast<std::size_t>(h)].state;
        StepInfo& info = ctx.steps[static_cast<std::size_t>(h)];
        info.single = st_.is_single(h, x);
        info.branch = choice.branch(h, x);
        if (!info.single) {
            const double g = gap_threshold(h, st_.delta_hat);
            info.tau = st_.ran.v(h, x) > g;
            info.sigma = st_.clip.v(h, x) > g / (1.0 + 1.0 / H);
        }
    }
    int next_free = H;
    for (int h = H - 1; h >= 0; --h) {
        ctx.steps[static_cast<std::size_t>(h)].next_free = next_free;
        if (!ctx.steps[static_cast<std::size_t>(h)].single) next_free = h;
    }
    return ctx;
}

double Learner::next_value(const StateTable<double>& v, const Trajectory& t, int next_step) const {
    if (next_step >= st_.horizon) return 0.0;
    return v(next_step, t.steps[static_cast<std::size_t>(next_step)].state);
}

void Learner::update_confidence(const EpisodeContext& ctx) {
    const Trajectory& t = *ctx.trajectory;
    const int H = st_.horizon;
    // Ascending h: later steps still hold this episode's starting values.
    for (int h = 0; h < H; ++h) {
        const StepInfo& info = ctx.steps[static_cast<std::size_t>(h)];
        if (info.single) continue;
        const Step& s = t.steps[static_cast<std::size_t>(h)];
        const int x = s.state, a = s.action;
        const std::int64_t n = ++st_.visits(h, x, a);
        const double alpha = step_size(n, H);
        const double b = bonus(n, H, st_.iota, cfg_.c0);
        double r_hat = 0.0;
        for (int j = h; j < info.next_free; ++j) r_hat += t.steps[static_cast<std::size_t>(j)].reward;
        const double up_next = next_value(st_.v_bar, t, info.next_free);
        const double lo_next = next_value(st_.v_und, t, info.next_free);

        double& qb = st_.q_bar_raw(h, x, a);
        qb = (1.0 - alpha) * qb + alpha * (r_hat + up_next + b);
        st_.q_bar(h, x, a) = std::min(st_.q_bar(h, x, a), qb);

        double& qu = st_.q_und_raw(h, x, a);
        qu = (1.0 - alpha) * qu + alpha * (r_hat + lo_next - b);
        st_.q_und(h, x, a) = std::max(st_.q_und(h, x, a), qu);

        const int lo_arg = active_argmax(st_, h, x, [&](int a2) { return st_.q_und(h, x, a2); });
        const int up_arg = active_argmax(st_, h, x, [&](int a2) { return st_.q_bar(h, x, a2); });
        st_.v_und(h, x) = st_.q_und(h, x, lo_arg);
        st_.v_bar(h, x) = st_.q_bar(h, x, up_arg);
    }
}

void Learner::update_action_sets() {
    const int S = st_.num_states, A = st_.num_actions, H = st_.horizon;
    for (int h = 0; h < H; ++h) {
        for (int x = 0; x < S; ++x) {
            if (st_.active_count(h, x) <= 1) continue;
            const double floor = st_.v_und(h, x);
            int kept = 0;
            for (int a = 0; a < A; ++a) {
                if (st_.is_active(h, x, a) && st_.q_bar(h, x, a) >= floor) ++kept;
            }
            if (kept == 0) {
                // Upper and lower bounds crossed (only possible when confidence
                // intervals fail). Keep the most optimistic action alive.
                const int keep = active_argmax(st_, h, x, [&](int a2) { return st_.q_bar(h, x, a2); });
                for (int a = 0; a < A; ++a) st_.active(h, x, a) = a == keep ? 1 : 0;
                st_.active_count(h, x) = 1;
                ++st_.empty_set_guards;
                continue;
            }
            for (int a = 0; a < A; ++a) {
                if (st_.is_active(h, x, a) && st_.q_bar(h, x, a) < floor) st_.active(h, x, a) = 0;
            }
            st_.active_count(h, x) = kept;
        }
    }
}

void Learner::update_predictions(const EpisodeContext& ctx) {
    const Trajectory& t = *ctx.trajectory;
    const int H = st_.horizon;
    for (int h = 0; h < H; ++h) {
        const Step& s = t.steps[static_cast<std::size_t>(h)];
        const int x = s.state, a = s.action;
        const std::int64_t n = st_.visits(h, x, a);
        // A pair first reached while already single has no count yet; its
        // running estimate stays at the initial value until a counted visit.
        if (n > 0) {
            const double alpha = step_size(n, H);
            const double b = bonus(n, H, st_.iota, cfg_.c0);
            const double til_next = next_value(st_.v_til, t, h + 1);
            double& r = st_.r_bar(h, x, a);
            r = (1.0 - alpha) * r + alpha * (s.reward + til_next + b);
        }
        st_.q_til(h, x, a) = std::min({st_.r_bar(h, x, a), st_.q_til(h, x, a), st_.q_bar(h, x, a)});
        const int best = active_argmax(st_, h, x, [&](int a2) {
            return std::max(st_.q_til(h, x, a2), st_.q_und(h, x, a2));
        });
        st_.v_til(h, x) = std::max(st_.q_til(h, x, best), st_.q_und(h, x, best));
    }
}

void Learner::update_ranges(const EpisodeContext& ctx) {
    const Trajectory& t = *ctx.trajectory;
    const int S = st_.num_states, H = st_.horizon;

    // Freeze the clipped ranges seen at exploring visits (start-of-episode values).
    for (int h = 0; h < H; ++h) {
        const StepInfo& info = ctx.steps[static_cast<std::size_t>(h)];
        if (!info.tau) continue;
        const Step& s = t.steps[static_cast<std::size_t>(h)];
        st_.frozen(h, s.state, s.action) = st_.clip.q(h, s.state, s.action).value;
        st_.frozen_sched(h, s.state, s.action) = st_.sched.q(h, s.state, s.action).value;
    }

    // Range Q updates for counted visits. Every V read here is still the
    // start-of-episode value since V ranges are refreshed afterwards.
    for (int h = 0; h < H; ++h) {
        const StepInfo& info = ctx.steps[static_cast<std::size_t>(h)];
        if (info.single) continue;
        const Step& s = t.steps[static_cast<std::size_t>(h)];
        const int x = s.state, a = s.action;
        const std::int64_t n = st_.visits(h, x, a);
        WeightedAverage& bacc = st_.beta(h, x, a);
        bacc.push(2.0 * bonus(n, H, st_.iota, cfg_.c0), H);
        const VisitRecord rec{next_value(st_.ran.v, t, info.next_free),
                              next_value(st_.clip.v, t, info.next_free),
                              next_value(st_.sched.v, t, info.next_free)};
        st_.ran.q(h, x, a).push(bacc.value, st_.ran.clip_threshold, rec.ran_next, H);
        st_.clip.q(h, x, a).push(bacc.value, st_.clip.clip_threshold, rec.clip_next, H);
        st_.sched.q(h, x, a).push(bacc.value, st_.sched.clip_threshold, rec.sched_next, H);
        if (cfg_.record_history) history_(h, x, a).push_back(rec);
    }

    // Range V refresh wherever defined for the next episode.
    for (int h = 0; h < H; ++h) {
        for (int x = 0; x < S; ++x) {
            if (st_.is_single(h, x)) continue;
            const int star = active_argmax(st_, h, x, [&](int a2) { return st_.q_bar(h, x, a2) - st_.q_und(h, x, a2); });
            st_.ran.v(h, x) = std::min(st_.ran.v(h, x), st_.ran.q(h, x, star).value);
            st_.clip.v(h, x) = std::min(st_.clip.v(h, x), st_.clip.q(h, x, star).value);
            st_.sched.v(h, x) = std::min(st_.sched.v(h, x), st_.sched.q(h, x, star).value);
        }
    }
}

double Learner::delta_incr_value() const {
    const int S = st_.num_states, A = st_.num_actions, H = st_.horizon;
    const double h = static_cast<double>(H);
    const double lambda = cfg_.schedule.lambda;
    const double K = static_cast<double>(std::max<std::int64_t>(cfg_.episodes, 1));
    const double iota2 = st_.iota * st_.iota;
    const double floor = cfg_.schedule.delta_min_lower / (4.0 * h * h);
    const double uniform = std::sqrt(S * A * std::pow(h, 8) * iota2 / (lambda * K));
    double sum = 0.0;
    for (double f : st_.frozen_sched.raw()) {
        const double d = std::max(f / (2.0 * h), floor);
        if (d <= 0.0) return uniform;  // a zero denominator makes the first branch infinite
        sum += 1.0 / d;
    }
    const double gap_branch = std::pow(h, 5) * iota2 / (lambda * K) * sum;
    return std::min(gap_branch, uniform);
}

void Learner::update_schedule() {
    if (cfg_.schedule.kind == ScheduleKind::delta_incr) st_.delta_hat = delta_incr_value();
}

EpisodeRecord Learner::run_episode(const TabularMdp& mdp) {
    if (mdp.num_states != st_.num_states || mdp.num_actions != st_.num_actions ||
        mdp.horizon != st_.horizon) {
        throw InvalidArgument("run_episode: mdp shape does not match the learner");
    }
    EpisodeRecord rec;
    rec.episode = st_.episodes_done;
    const PolicyChoice choice = select_policy();
    rec.trajectory = simulate_episode(mdp, choice.policy, st_.episodes_done, cfg_.seed);
    const EpisodeContext ctx = observe(rec.trajectory, choice);
    update_confidence(ctx);
    update_action_sets();
    update_predictions(ctx);
    update_ranges(ctx);
    update_schedule();
    ++st_.episodes_done;
    rec.policy = choice.policy;
    rec.steps = ctx.steps;
    rec.delta_hat = ctx.delta_hat;
    return rec;
}

const std::vector<VisitRecord>& Learner::history(int h, int x, int a) const {
    if (!cfg_.record_history) throw InvalidArgument("history requested but record_history is off");
    return history_(h, x, a);
}

std::vector<std::string> check_state(const LearnerState& s) {
    std::vector<std::string> out;
    for (int h = 0; h < s.horizon; ++h) {
        for (int x = 0; x < s.num_states; ++x) {
            int count = 0;
            for (int a = 0; a < s.num_actions; ++a) count += s.is_active(h, x, a) ? 1 : 0;
            if (count == 0) out.push_back(cell("empty action set", h, x));
            if (count != s.active_count(h, x)) out.push_back(cell("active count mismatch", h, x));
            if (s.v_til(h, x) > s.v_bar(h, x)) out.push_back(cell("V_til > V_bar", h, x));
            if (s.is_single(h, x)) continue;
            if (s.clip.v(h, x) > s.ran.v(h, x)) out.push_back(cell("ClipV > RanV", h, x));
            for (int a = 0; a < s.num_actions; ++a) {
                if (!s.is_active(h, x, a)) continue;
                if (s.clip.q(h, x, a).value > s.ran.q(h, x, a).value) out.push_back(cell("ClipQ > RanQ", h, x, a));
            }
        }
    }
    return out;
}

std::vector<std::string> check_transition(const LearnerState& b, const LearnerState& n,
                                          ScheduleKind schedule) {
    std::vector<std::string> out;
    for (int h = 0; h < b.horizon; ++h) {
        for (int x = 0; x < b.num_states; ++x) {
            if (n.v_bar(h, x) > b.v_bar(h, x)) out.push_back(cell("V_bar increased", h, x));
            if (n.v_und(h, x) < b.v_und(h, x)) out.push_back(cell("V_und decreased", h, x));
            if (n.v_til(h, x) > b.v_til(h, x)) out.push_back(cell("V_til increased", h, x));
            if (b.is_single(h, x) && !n.is_single(h, x)) out.push_back(cell("left single set", h, x));
            const bool defined = !n.is_single(h, x);
            if (defined) {
                if (n.ran.v(h, x) > b.ran.v(h, x)) out.push_back(cell("RanV increased", h, x));
                if (n.clip.v(h, x) > b.clip.v(h, x)) out.push_back(cell("ClipV increased", h, x));
            }
            for (int a = 0; a < b.num_actions; ++a) {
                if (n.q_bar(h, x, a) > b.q_bar(h, x, a)) out.push_back(cell("Q_bar increased", h, x, a));
                if (n.q_und(h, x, a) < b.q_und(h, x, a)) out.push_back(cell("Q_und decreased", h, x, a));
                if (n.q_til(h, x, a) > b.q_til(h, x, a)) out.push_back(cell("Q_til increased", h, x, a));
                if (n.is_active(h, x, a) && !b.is_active(h, x, a)) out.push_back(cell("action re-entered", h, x, a));
                if (n.frozen(h, x, a) > b.frozen(h, x, a)) out.push_back(cell("FrzQ increased", h, x, a));
                if (defined && n.is_active(h, x, a)) {
                    if (n.ran.q(h, x, a).value > b.ran.q(h, x, a).value) out.push_back(cell("RanQ increased", h, x, a));
                    if (n.clip.q(h, x, a).value > b.clip.q(h, x, a).value) out.push_back(cell("ClipQ increased", h, x, a));
                }
            }
        }
    }
    if (n.delta_hat < b.delta_hat) out.push_back("delta_hat decreased");
    if (schedule == ScheduleKind::delta_const && n.delta_hat != b.delta_hat) {
        out.push_back("delta_hat changed under delta_const");
    }
    return out;
}

void EventReport::merge(const EventReport& o) {
    confidence_q = confidence_q && o.confidence_q;
    confidence_v = confidence_v && o.confidence_v;
    optimal_retained = optimal_retained && o.optimal_retained;
    range_dominates = range_dominates && o.range_dominates;
    clip_lower_bound = clip_lower_bound && o.clip_lower_bound;
    frozen_gap_bound = frozen_gap_bound && o.frozen_gap_bound;
}

EventReport check_events(const LearnerState& s, const OptimalProfile& p, double tol) {
    EventReport r;
    const double slack = p.delta_min.value_or(0.0) / (4.0 * s.horizon);
    for (int h = 0; h < s.horizon; ++h) {
        for (int x = 0; x < s.num_states; ++x) {
            const double vs = p.v_star(h, x);
            if (s.v_bar(h, x) < vs - tol || s.v_und(h, x) > vs + tol) r.confidence_v = false;
            const bool defined = !s.is_single(h, x);
            if (defined) {
                if (s.ran.v(h, x) < s.v_bar(h, x) - s.v_und(h, x) - tol) r.range_dominates = false;
                if (s.clip.v(h, x) < s.ran.v(h, x) - slack - tol) r.clip_lower_bound = false;
            }
            for (int a = 0; a < s.num_actions; ++a) {
                const double qs = p.q_star(h, x, a);
                if (s.q_bar(h, x, a) < qs - tol || s.q_und(h, x, a) > qs + tol) r.confidence_q = false;
                if (p.is_optimal(h, x, a) && !s.is_active(h, x, a)) r.optimal_retained = false;
                if (defined && s.is_active(h, x, a)) {
                    const double ran = s.ran.q(h, x, a).value;
                    if (ran < s.q_bar(h, x, a) - s.q_und(h, x, a) - tol) r.range_dominates = false;
                    if (s.clip.q(h, x, a).value < ran - slack - tol) r.clip_lower_bound = false;
                }
            }
        }
    }
    return r;
}

EventReport check_frozen_gap(const LearnerState& s, const OptimalProfile& p, double tol) {
    EventReport r;
    const double H = s.horizon;
    const double floor = p.delta_min.value_or(0.0) / (4.0 * H * H);
    for (int h = 0; h < s.horizon; ++h) {
        for (int x = 0; x < s.num_states; ++x) {
            for (int a = 0; a < s.num_actions; ++a) {
                const double lhs = std::max(s.frozen(h, x, a) / (2.0 * H), floor);
                if (lhs < p.gap(h, x, a) / (8.0 * H) - tol) r.frozen_gap_bound = false;
            }
        }
    }
    return r;
}

}  // namespace predrl
