#include "predrl/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <regex>
#include <sstream>
#include <thread>

namespace predrl {

namespace fs = std::filesystem;

std::string ledger_csv(const RegretLedger& ledger) {
    std::string out = kLedgerCsvHeader;
    out += '\n';
    for (const auto& r : ledger.rows) {
        out += std::to_string(r.episode);
        out += ',';
        out += fmt_real(r.cum_regret);
        out += ',';
        out += fmt_real(r.inst_regret);
        out += ',';
        out += fmt_real(r.delta_hat);
        out += ',';
        out += std::to_string(r.n_sigma);
        out += ',';
        out += std::to_string(r.n_tau);
        out += '\n';
    }
    return out;
}

RegretLedger run_learner(const TabularMdp& mdp, const OptimalProfile& profile, Learner& learner,
                         const EpisodeHook& hook) {
    RegretLedger ledger;
    const std::int64_t K = learner.config().episodes;
    ledger.rows.reserve(static_cast<std::size_t>(K));
    double cum = 0.0;
    for (std::int64_t k = 0; k < K; ++k) {
        const EpisodeRecord rec = learner.run_episode(mdp);
        const int x0 = mdp.initial_state(k);
        const auto v = policy_value(mdp, rec.policy);
        const double inst = profile.v_star(0, x0) - v[0][static_cast<std::size_t>(x0)];
        cum += inst;
        LedgerRow row;
        row.episode = k + 1;
        row.inst_regret = inst;
        row.cum_regret = cum;
        row.delta_hat = rec.delta_hat;
        for (const auto& s : rec.steps) {
            row.n_sigma += s.sigma ? 1 : 0;
            row.n_tau += s.tau ? 1 : 0;
        }
        ledger.rows.push_back(row);
        if (hook) hook(learner, rec);
    }
    return ledger;
}

LearnerConfig baseline_config(LearnerConfig cfg) {
    cfg.schedule = ScheduleConfig{};
    cfg.schedule.kind = ScheduleKind::delta_const;
    cfg.schedule.regret_budget = 0.0;
    return cfg;
}

std::string trace_line(const EpisodeRecord& rec, int h) {
    const auto& s = rec.trajectory.steps[static_cast<std::size_t>(h)];
    const auto& info = rec.steps[static_cast<std::size_t>(h)];
    Json j = {{"k", rec.episode + 1}, {"h", h},           {"x", s.state},
              {"a", s.action},        {"tau", info.tau ? 1 : 0}, {"sigma", info.sigma ? 1 : 0},
              {"delta_hat", rec.delta_hat}, {"branch", to_string(info.branch)}};
    return j.dump();
}

// ---------------------------------------------------------------------------
// Config parsing

namespace {

class Reader {
public:
    Reader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {}

    [[noreturn]] void fail(const std::string& msg) const {
        throw InvalidArgument("config " + (path_.empty() ? std::string("<root>") : path_) + ": " + msg);
    }

    bool has(const char* key) const { return j_.contains(key); }

    Reader at(const char* key) const {
        if (!j_.contains(key)) Reader(j_, join(key)).fail("missing required field");
        return Reader(j_.at(key), join(key));
    }

    Reader at(std::size_t i) const {
        return Reader(j_.at(i), path_ + "[" + std::to_string(i) + "]");
    }

    const Json& json() const { return j_; }
    const std::string& path() const { return path_; }

    double number() const {
        if (!j_.is_number()) fail("expected a number");
        return j_.get<double>();
    }
    std::int64_t integer() const {
        if (!j_.is_number_integer()) fail("expected an integer");
        return j_.get<std::int64_t>();
    }
    std::string string() const {
        if (!j_.is_string()) fail("expected a string");
        return j_.get<std::string>();
    }
    bool boolean() const {
        if (!j_.is_boolean()) fail("expected true or false");
        return j_.get<bool>();
    }
    std::size_t size() const {
        if (!j_.is_array()) fail("expected an array");
        return j_.size();
    }

    double number_or(const char* key, double dflt) const { return has(key) ? at(key).number() : dflt; }
    std::int64_t integer_or(const char* key, std::int64_t dflt) const { return has(key) ? at(key).integer() : dflt; }
    std::string string_or(const char* key, const std::string& dflt) const { return has(key) ? at(key).string() : dflt; }
    bool boolean_or(const char* key, bool dflt) const { return has(key) ? at(key).boolean() : dflt; }

    void only(std::initializer_list<const char*> keys) const {
        if (!j_.is_object()) fail("expected an object");
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; })) {
                Reader(j_, join(it.key().c_str())).fail("unknown field");
            }
        }
    }

private:
    std::string join(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

    const Json& j_;
    std::string path_;
};

PredictionSpec parse_prediction_spec(const Reader& r) {
    r.only({"kind", "eta", "c", "path"});
    PredictionSpec p;
    try {
        p.kind = parse_prediction_kind(r.at("kind").string());
    } catch (const InvalidArgument& e) {
        r.at("kind").fail(e.what());
    }
    p.eta = r.number_or("eta", 0.0);
    p.c = r.number_or("c", 0.0);
    return p;
}

ScheduleConfig parse_schedule(const Reader& r) {
    r.only({"kind", "regret_budget", "lambda", "delta_min_lower"});
    ScheduleConfig s;
    const std::string kind = r.at("kind").string();
    if (kind == "delta_const") {
        s.kind = ScheduleKind::delta_const;
        s.regret_budget = r.at("regret_budget").number();
    } else if (kind == "delta_incr") {
        s.kind = ScheduleKind::delta_incr;
        s.lambda = r.at("lambda").number();
        s.delta_min_lower = r.number_or("delta_min_lower", 0.0);
    } else {
        r.at("kind").fail("unknown schedule '" + kind + "' (expected delta_const or delta_incr)");
    }
    return s;
}

AlgorithmSpec parse_algorithm(const Reader& r, const std::string& base_dir) {
    r.only({"name", "kind", "predictions", "schedule", "c0", "clip", "lambda", "delta", "reward_model"});
    AlgorithmSpec a;
    a.name = r.at("name").string();
    if (a.name.empty() || a.name.find_first_of("/\\ ") != std::string::npos) {
        r.at("name").fail("name must be non-empty without spaces or slashes");
    }
    const std::string kind = r.at("kind").string();
    if (kind == "learner") a.kind = AlgorithmKind::learner;
    else if (kind == "baseline_optimistic") a.kind = AlgorithmKind::baseline_optimistic;
    else if (kind == "bandit") a.kind = AlgorithmKind::bandit;
    else r.at("kind").fail("unknown algorithm kind '" + kind + "'");

    if (r.has("predictions")) {
        const Reader p = r.at("predictions");
        if (p.has("path")) {
            fs::path path = p.at("path").string();
            if (path.is_relative()) path = fs::path(base_dir) / path;
            if (!fs::exists(path)) p.at("path").fail("file not found: " + path.string());
            a.predictions_path = path.string();
            a.predictions.kind = PredictionKind::exact;
        } else {
            a.predictions = parse_prediction_spec(p);
        }
    }
    a.learner.c0 = r.number_or("c0", 2.0);
    if (r.has("clip")) {
        const Reader c = r.at("clip");
        c.only({"mode", "delta"});
        try {
            a.learner.clip_mode = parse_clip_mode(c.at("mode").string());
        } catch (const InvalidArgument& e) {
            c.at("mode").fail(e.what());
        }
        if (a.learner.clip_mode == ClipMode::constant) a.learner.clip_delta = c.at("delta").number();
    }
    if (a.kind == AlgorithmKind::learner) {
        a.learner.schedule = parse_schedule(r.at("schedule"));
    } else if (a.kind == AlgorithmKind::baseline_optimistic) {
        if (r.has("schedule")) r.at("schedule").fail("baseline_optimistic pins its own schedule");
        a.learner = baseline_config(a.learner);
    } else {
        a.bandit_lambda = r.at("lambda").number();
        if (r.has("delta")) a.bandit_delta = r.at("delta").number();
        const std::string model = r.string_or("reward_model", "bernoulli");
        if (model == "bernoulli") a.reward_model = RewardModel::bernoulli;
        else if (model == "deterministic") a.reward_model = RewardModel::deterministic;
        else r.at("reward_model").fail("expected bernoulli or deterministic");
    }
    try {
        if (a.kind != AlgorithmKind::bandit) validate(a.learner);
    } catch (const InvalidArgument& e) {
        r.fail(e.what());
    }
    return a;
}

InstanceSpec parse_instance(const Reader& r, const std::string& base_dir) {
    InstanceSpec s;
    const std::string kind = r.at("kind").string();
    if (kind == "random") {
        r.only({"kind", "states", "actions", "horizon", "reward_sparsity", "seed", "vary_with_seed",
                "min_gap", "max_resample"});
        s.kind = InstanceKind::random;
        s.states = static_cast<int>(r.at("states").integer());
        s.actions = static_cast<int>(r.at("actions").integer());
        s.horizon = static_cast<int>(r.at("horizon").integer());
        s.reward_sparsity = r.number_or("reward_sparsity", 0.0);
        if (r.has("min_gap")) s.min_gap = r.at("min_gap").number();
        s.max_resample = static_cast<int>(r.integer_or("max_resample", 10000));
        if (s.states < 1 || s.actions < 1 || s.horizon < 1) r.fail("states, actions, horizon must be >= 1");
    } else if (kind == "bandit_gap") {
        r.only({"kind", "actions", "delta", "seed", "vary_with_seed"});
        s.kind = InstanceKind::bandit_gap;
        s.actions = static_cast<int>(r.at("actions").integer());
        s.delta = r.at("delta").number();
        s.states = 1;
        s.horizon = 1;
        if (s.actions < 2) r.at("actions").fail("need at least 2 actions");
        if (!(s.delta > 0.0 && s.delta < 1.0)) r.at("delta").fail("delta must lie in (0,1)");
    } else if (kind == "file") {
        r.only({"kind", "path"});
        s.kind = InstanceKind::file;
        fs::path path = r.at("path").string();
        if (path.is_relative()) path = fs::path(base_dir) / path;
        if (!fs::exists(path)) r.at("path").fail("file not found: " + path.string());
        s.path = path.string();
    } else {
        r.at("kind").fail("unknown instance kind '" + kind + "'");
    }
    s.seed = static_cast<std::uint64_t>(r.integer_or("seed", 0));
    s.vary_with_seed = r.boolean_or("vary_with_seed", false);
    return s;
}

}  // namespace

ExperimentConfig parse_config(const Json& j, const std::string& base_dir) {
    const Reader r(j, "");
    r.only({"name", "instance", "episodes", "T", "seeds", "checkpoints", "algorithms", "analysis", "output",
            "trace", "check_invariants"});
    ExperimentConfig c;
    c.name = r.string_or("name", "experiment");
    c.instance = parse_instance(r.at("instance"), base_dir);
    c.episodes = r.at("episodes").integer();
    if (c.episodes < 0) r.at("episodes").fail("must be >= 0");
    if (r.has("T") && c.instance.kind != InstanceKind::file &&
        r.at("T").integer() != c.episodes * c.instance.horizon) {
        r.at("T").fail("T must equal episodes * horizon");
    }

    if (r.has("seeds")) {
        const Reader s = r.at("seeds");
        c.seeds.clear();
        if (s.json().is_array()) {
            for (std::size_t i = 0; i < s.size(); ++i) c.seeds.push_back(static_cast<std::uint64_t>(s.at(i).integer()));
        } else {
            s.only({"start", "count"});
            const auto start = s.at("start").integer();
            const auto count = s.at("count").integer();
            if (count < 0) s.at("count").fail("must be >= 0");
            for (std::int64_t i = 0; i < count; ++i) c.seeds.push_back(static_cast<std::uint64_t>(start + i));
        }
    }
    if (r.has("checkpoints")) {
        const Reader cp = r.at("checkpoints");
        for (std::size_t i = 0; i < cp.size(); ++i) {
            const auto v = cp.at(i).integer();
            if (v < 1) cp.at(i).fail("checkpoints are 1-based episode numbers");
            c.checkpoints.push_back(v);
        }
    } else {
        c.checkpoints = default_checkpoints(c.episodes);
    }

    const Reader algs = r.at("algorithms");
    for (std::size_t i = 0; i < algs.size(); ++i) {
        AlgorithmSpec a = parse_algorithm(algs.at(i), base_dir);
        a.learner.episodes = c.episodes;
        for (const auto& prev : c.algorithms) {
            if (prev.name == a.name) algs.at(i).at("name").fail("duplicate algorithm name");
        }
        if (a.kind == AlgorithmKind::bandit && (c.instance.kind == InstanceKind::random &&
                                                (c.instance.states != 1 || c.instance.horizon != 1))) {
            algs.at(i).fail("bandit algorithms need a single-state, single-step instance");
        }
        c.algorithms.push_back(std::move(a));
    }

    if (r.has("analysis")) {
        const Reader a = r.at("analysis");
        a.only({"lambda", "distillation_eps", "eps_prime", "delta_tilde"});
        c.analysis.lambda = a.number_or("lambda", c.analysis.lambda);
        c.analysis.distillation_eps = a.number_or("distillation_eps", c.analysis.distillation_eps);
        c.analysis.eps_prime = a.number_or("eps_prime", c.analysis.eps_prime);
        if (a.has("delta_tilde")) c.analysis.delta_tilde = a.at("delta_tilde").number();
        if (!(c.analysis.lambda > 0.0 && c.analysis.lambda <= 1.0)) a.at("lambda").fail("must lie in (0,1]");
        if (!(c.analysis.eps_prime > 0.0)) a.at("eps_prime").fail("must be > 0");
    }
    if (r.has("output")) {
        fs::path out = r.at("output").string();
        c.output_dir = out.string();
    }
    c.trace = r.boolean_or("trace", false);
    c.check_invariants = r.boolean_or("check_invariants", false);
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    const Json j = read_json_file(path);
    return parse_config(j, fs::path(path).parent_path().string());
}

TabularMdp build_instance(const InstanceSpec& spec, std::uint64_t run_seed) {
    const std::uint64_t base = spec.vary_with_seed ? mix_seed(spec.seed, run_seed) : spec.seed;
    switch (spec.kind) {
        case InstanceKind::bandit_gap:
            return bandit_gap_instance(spec.actions, spec.delta);
        case InstanceKind::file:
            return load_mdp(spec.path);
        case InstanceKind::random: {
            if (!spec.min_gap) return random_mdp(base, spec.states, spec.actions, spec.horizon, spec.reward_sparsity);
            for (int attempt = 0; attempt <= spec.max_resample; ++attempt) {
                const std::uint64_t s = attempt == 0 ? base : mix_seed(base, static_cast<std::uint64_t>(attempt));
                TabularMdp m = random_mdp(s, spec.states, spec.actions, spec.horizon, spec.reward_sparsity);
                const auto p = value_iteration(m);
                if (p.delta_min && *p.delta_min >= *spec.min_gap) return m;
            }
            throw InvalidArgument("no random instance reached min_gap within max_resample attempts");
        }
    }
    throw InvalidArgument("unknown instance kind");
}

PredictionTable build_predictions(const AlgorithmSpec& alg, const OptimalProfile& profile,
                                  std::uint64_t run_seed) {
    if (alg.predictions_path) {
        const Json j = read_json_file(*alg.predictions_path);
        return table_from_json(j.contains("q_tilde") ? j.at("q_tilde") : j, profile.horizon,
                               profile.num_states, profile.num_actions);
    }
    return make_predictions(alg.predictions, profile, mix_seed(run_seed, 0x51ULL));
}

// ---------------------------------------------------------------------------
// Reporting helpers

std::vector<std::int64_t> default_checkpoints(std::int64_t length, int count) {
    std::vector<std::int64_t> out;
    if (length <= 0) return out;
    for (int i = 1; i <= count; ++i) {
        const std::int64_t e = std::max<std::int64_t>(1, length * i / count);
        if (out.empty() || out.back() != e) out.push_back(e);
    }
    return out;
}

Json hardness_json(const HardnessReport& r) {
    auto ext = [](const ExtendedReal& e) -> Json { return e.is_infinite() ? Json("inf") : Json(e.value()); };
    Json j = {{"T", r.horizon_steps},
              {"lambda", r.lambda},
              {"iota", r.iota},
              {"gap_sum", r.gap_sum},
              {"a_mul", r.a_mul},
              {"a_mul_term", r.a_mul_term},
              {"uniform_term", r.uniform_term},
              {"gap_term", ext(r.gap_term)},
              {"lambda_cost", ext(r.lambda_cost)}};
    if (r.delta_tilde) {
        j["delta_tilde"] = *r.delta_tilde;
        j["variant_gap_term"] = ext(r.variant_gap_term);
        j["variant_cost"] = ext(r.variant_cost);
    }
    return j;
}

Json profile_json(const OptimalProfile& p) {
    Json v = Json::array();
    for (int h = 0; h < p.horizon; ++h) {
        Json row = Json::array();
        for (int x = 0; x < p.num_states; ++x) row.push_back(p.v_star(h, x));
        v.push_back(std::move(row));
    }
    Json dms = Json::array();
    for (int h = 0; h < p.horizon; ++h) {
        Json row = Json::array();
        for (int x = 0; x < p.num_states; ++x) {
            const auto& d = p.delta_min_state(h, x);
            row.push_back(d ? Json(*d) : Json(nullptr));
        }
        dms.push_back(std::move(row));
    }
    return Json{{"q_star", table_to_json(p.q_star)},
                {"v_star", std::move(v)},
                {"gap", table_to_json(p.gap)},
                {"delta_min", p.delta_min ? Json(*p.delta_min) : Json(nullptr)},
                {"delta_min_state", std::move(dms)},
                {"a_mul", p.a_mul_size()}};
}

Json classify_predictions(const PredictionTable& preds, const OptimalProfile& profile,
                          const AnalysisSpec& spec) {
    const auto dist = is_eps_distillation(preds, profile, spec.distillation_eps);
    const auto fool = fooling_set(preds, profile, spec.eps_prime / 2.0, spec.eps_prime);
    return Json{{"distillation_eps", spec.distillation_eps},
                {"is_distillation", dist.holds},
                {"eps_prime", spec.eps_prime},
                {"fooling_set_size", fool.size()},
                {"lacks_fooling_optimal_actions", lacks_fooling_optimal_actions(preds, profile, spec.eps_prime)}};
}

std::vector<PlotRow> emit_plot_data(const std::vector<RunResult>& runs,
                                    const std::vector<std::int64_t>& checkpoints,
                                    std::vector<std::string>* warnings) {
    std::vector<PlotRow> out;
    for (const auto& run : runs) {
        const auto len = static_cast<std::int64_t>(run.cum_regret.size());
        for (std::int64_t c : checkpoints) {
            std::int64_t e = c;
            if (len == 0) continue;
            if (e > len) {
                if (warnings) {
                    warnings->push_back("checkpoint " + std::to_string(c) + " clipped to " + std::to_string(len) +
                                        " for " + run.algorithm + " seed " + std::to_string(run.seed));
                }
                e = len;
            }
            if (e < 1) e = 1;
            out.push_back({run.algorithm, run.seed, e, run.cum_regret[static_cast<std::size_t>(e - 1)]});
        }
    }
    return out;
}

std::string plot_csv(const std::vector<PlotRow>& rows) {
    std::string out = "algorithm,seed,episode,cum_regret\n";
    for (const auto& r : rows) {
        out += r.algorithm + "," + std::to_string(r.seed) + "," + std::to_string(r.episode) + "," +
               fmt_real(r.cum_regret) + "\n";
    }
    return out;
}

std::vector<RunResult> load_run_dir(const std::string& dir) {
    const std::regex name_re(R"((.+)__seed(\d+)\.csv)");
    std::vector<RunResult> runs;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string fname = entry.path().filename().string();
        std::smatch m;
        if (!std::regex_match(fname, m, name_re)) continue;
        RunResult r;
        r.algorithm = m[1];
        r.seed = std::stoull(m[2]);
        std::ifstream in(entry.path());
        std::string line;
        std::getline(in, line);
        // Both ledger schemas carry cum_regret; find its column from the header.
        std::vector<std::string> cols;
        {
            std::stringstream ss(line);
            std::string c;
            while (std::getline(ss, c, ',')) cols.push_back(c);
        }
        const auto it = std::find(cols.begin(), cols.end(), "cum_regret");
        if (it == cols.end()) throw InvalidArgument(entry.path().string() + ": no cum_regret column");
        const auto idx = static_cast<std::size_t>(it - cols.begin());
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::stringstream ss(line);
            std::string c;
            for (std::size_t i = 0; i <= idx && std::getline(ss, c, ','); ++i) {}
            r.cum_regret.push_back(std::stod(c));
        }
        runs.push_back(std::move(r));
    }
    std::sort(runs.begin(), runs.end(), [](const RunResult& a, const RunResult& b) {
        return a.algorithm != b.algorithm ? a.algorithm < b.algorithm : a.seed < b.seed;
    });
    return runs;
}

// ---------------------------------------------------------------------------
// Experiment driver

namespace {

struct Task {
    std::size_t alg = 0;
    std::size_t seed_index = 0;
};

RunResult execute(const ExperimentConfig& cfg, const AlgorithmSpec& alg, std::uint64_t seed) {
    RunResult res;
    res.algorithm = alg.name;
    res.seed = seed;
    const TabularMdp mdp = build_instance(cfg.instance, seed);
    const OptimalProfile profile = value_iteration(mdp);
    const PredictionTable preds = build_predictions(alg, profile, seed);
    const fs::path base = fs::path(cfg.output_dir) / (alg.name + "__seed" + std::to_string(seed));

    if (alg.kind == AlgorithmKind::bandit) {
        BanditInstance inst;
        inst.means.assign(mdp.rewards.row(0, 0).begin(), mdp.rewards.row(0, 0).end());
        inst.model = alg.reward_model;
        inst.seed = mix_seed(seed, 0xBA5EULL);
        std::vector<double> p(preds.row(0, 0).begin(), preds.row(0, 0).end());
        const BanditRun run = run_bandit(inst, p, cfg.episodes, alg.bandit_lambda, alg.bandit_delta);
        res.warnings = run.warnings;
        res.cum_regret.reserve(run.rows.size());
        for (const auto& r : run.rows) res.cum_regret.push_back(r.cum_regret);
        write_text_file(base.string() + ".csv", bandit_csv(run));
        return res;
    }

    LearnerConfig lc = resolve_clip(alg.learner, profile);
    lc.seed = seed;
    Learner learner(mdp.num_states, mdp.num_actions, mdp.horizon, preds, lc);
    std::ofstream trace;
    if (cfg.trace) {
        trace.open(base.string() + ".trace.jsonl", std::ios::binary);
        if (!trace) throw std::runtime_error("cannot write trace for " + base.string());
    }
    LearnerState prev;
    if (cfg.check_invariants) prev = learner.state();
    EpisodeHook hook;
    if (cfg.trace || cfg.check_invariants) {
        hook = [&](const Learner& l, const EpisodeRecord& rec) {
            if (cfg.trace) {
                for (int h = 0; h < mdp.horizon; ++h) trace << trace_line(rec, h) << '\n';
            }
            if (cfg.check_invariants) {
                const auto& now = l.state();
                res.invariant_violations += static_cast<std::int64_t>(check_state(now).size());
                res.invariant_violations +=
                    static_cast<std::int64_t>(check_transition(prev, now, lc.schedule.kind).size());
                prev = now;
            }
        };
    }
    const RegretLedger ledger = run_learner(mdp, profile, learner, hook);
    res.empty_set_guards = learner.state().empty_set_guards;
    res.cum_regret.reserve(ledger.rows.size());
    for (const auto& r : ledger.rows) res.cum_regret.push_back(r.cum_regret);
    write_text_file(base.string() + ".csv", ledger_csv(ledger));
    return res;
}

Json instance_summary(const ExperimentConfig& cfg, std::uint64_t seed) {
    const TabularMdp mdp = build_instance(cfg.instance, seed);
    const OptimalProfile profile = value_iteration(mdp);
    const double T = static_cast<double>(std::max<std::int64_t>(cfg.episodes, 1)) * mdp.horizon;
    Json j = {{"states", mdp.num_states},
              {"actions", mdp.num_actions},
              {"horizon", mdp.horizon},
              {"delta_min", profile.delta_min ? Json(*profile.delta_min) : Json(nullptr)},
              {"v_star_initial", profile.v_star(0, mdp.initial_states[0])},
              {"hardness", hardness_json(lambda_cost(profile, T, cfg.analysis.lambda, cfg.analysis.delta_tilde))}};
    Json preds = Json::object();
    for (const auto& alg : cfg.algorithms) {
        preds[alg.name] = classify_predictions(build_predictions(alg, profile, seed), profile, cfg.analysis);
    }
    j["predictions"] = std::move(preds);
    return j;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, int jobs) {
    fs::create_directories(cfg.output_dir);
    std::vector<Task> tasks;
    for (std::size_t a = 0; a < cfg.algorithms.size(); ++a)
        for (std::size_t s = 0; s < cfg.seeds.size(); ++s) tasks.push_back({a, s});

    ExperimentResult result;
    result.runs.resize(tasks.size());
    std::vector<std::string> errors(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            const Task& t = tasks[i];
            try {
                result.runs[i] = execute(cfg, cfg.algorithms[t.alg], cfg.seeds[t.seed_index]);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    const int n_workers = std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (!errors[i].empty()) {
            throw std::runtime_error(cfg.algorithms[tasks[i].alg].name + " seed " +
                                     std::to_string(cfg.seeds[tasks[i].seed_index]) + ": " + errors[i]);
        }
    }

    Json summary = {{"name", cfg.name}, {"episodes", cfg.episodes}, {"seeds", cfg.seeds}, {"checkpoints", cfg.checkpoints}};
    if (cfg.instance.vary_with_seed) {
        Json per = Json::array();
        for (auto s : cfg.seeds) {
            Json j = instance_summary(cfg, s);
            j["seed"] = s;
            per.push_back(std::move(j));
        }
        summary["instances"] = std::move(per);
    } else {
        summary["instance"] = instance_summary(cfg, cfg.seeds.empty() ? 0 : cfg.seeds.front());
    }

    Json algs = Json::array();
    for (std::size_t a = 0; a < cfg.algorithms.size(); ++a) {
        Json cps = Json::array();
        for (std::int64_t c : cfg.checkpoints) {
            std::vector<double> vals;
            for (std::size_t s = 0; s < cfg.seeds.size(); ++s) {
                const auto& cr = result.runs[a * cfg.seeds.size() + s].cum_regret;
                if (cr.empty()) continue;
                const auto e = std::min<std::int64_t>(c, static_cast<std::int64_t>(cr.size()));
                vals.push_back(cr[static_cast<std::size_t>(e - 1)]);
            }
            if (vals.empty()) continue;
            double mean = 0.0;
            for (double v : vals) mean += v;
            mean /= static_cast<double>(vals.size());
            double var = 0.0;
            for (double v : vals) var += (v - mean) * (v - mean);
            const double sd = vals.size() > 1 ? std::sqrt(var / static_cast<double>(vals.size() - 1)) : 0.0;
            cps.push_back({{"episode", c}, {"mean_cum_regret", mean}, {"std_cum_regret", sd}});
        }
        Json finals = Json::array();
        std::int64_t violations = 0, guards = 0;
        std::vector<std::string> warnings;
        for (std::size_t s = 0; s < cfg.seeds.size(); ++s) {
            const auto& run = result.runs[a * cfg.seeds.size() + s];
            finals.push_back(run.cum_regret.empty() ? 0.0 : run.cum_regret.back());
            violations += run.invariant_violations;
            guards += run.empty_set_guards;
            for (const auto& w : run.warnings) {
                if (std::find(warnings.begin(), warnings.end(), w) == warnings.end()) warnings.push_back(w);
            }
        }
        Json entry = {{"name", cfg.algorithms[a].name},
                      {"final_cum_regret", std::move(finals)},
                      {"checkpoints", std::move(cps)},
                      {"empty_set_guards", guards}};
        if (cfg.check_invariants) entry["invariant_violations"] = violations;
        if (!warnings.empty()) entry["warnings"] = warnings;
        algs.push_back(std::move(entry));
    }
    summary["algorithms"] = std::move(algs);
    write_text_file((fs::path(cfg.output_dir) / "summary.json").string(), summary.dump(2) + "\n");

    std::vector<std::string> warnings;
    const auto rows = emit_plot_data(result.runs, cfg.checkpoints, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
    write_text_file((fs::path(cfg.output_dir) / "plotdata.csv").string(), plot_csv(rows));
    result.summary = std::move(summary);
    return result;
}

}  // namespace predrl
