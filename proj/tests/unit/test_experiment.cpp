#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "predrl/experiment.hpp"

using namespace predrl;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("predrl_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

Json small_config(const fs::path& out) {
    Json j = Json::parse(R"({
      "name": "t",
      "instance": {"kind": "random", "states": 3, "actions": 2, "horizon": 2, "seed": 4},
      "episodes": 200,
      "seeds": [1, 2],
      "checkpoints": [1, 100, 200],
      "algorithms": [
        {"name": "incr", "kind": "learner", "predictions": {"kind": "noisy_distillation", "eta": 0.1},
         "schedule": {"kind": "delta_incr", "lambda": 0.5}},
        {"name": "base", "kind": "baseline_optimistic"}
      ]
    })");
    j["output"] = out.string();
    return j;
}

std::string config_error(const Json& j) {
    try {
        parse_config(j);
    } catch (const InvalidArgument& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Ledger, CsvHeaderAndRows) {
    RegretLedger l;
    l.rows.push_back({1, 0.5, 0.5, 0.0, 2, 3});
    l.rows.push_back({2, 0.75, 0.25, 1.0 / 3.0, 0, 1});
    EXPECT_EQ(ledger_csv(l),
              "episode,cum_regret,inst_regret,delta_hat,n_sigma,n_tau\n"
              "1,0.5,0.5,0,2,3\n2,0.75,0.25,0.333333333333,0,1\n");
}

TEST(RunLearner, RegretIsExactAndPrefixSummed) {
    const auto m = random_mdp(5, 3, 2, 3, 0.0);
    const auto p = value_iteration(m);
    LearnerConfig cfg;
    cfg.episodes = 300;
    cfg.schedule.regret_budget = 10.0;
    Learner l(3, 2, 3, make_predictions({PredictionKind::flat_misleading}, p, 1), resolve_clip(cfg, p));
    std::vector<Policy> policies;
    const auto ledger = run_learner(m, p, l, [&](const Learner&, const EpisodeRecord& r) { policies.push_back(r.policy); });
    ASSERT_EQ(ledger.rows.size(), 300u);
    double acc = 0.0;
    for (std::size_t k = 0; k < ledger.rows.size(); ++k) {
        const auto& row = ledger.rows[k];
        const int x0 = m.initial_state(static_cast<std::int64_t>(k));
        EXPECT_NEAR(row.inst_regret, p.v_star(0, x0) - oracle::rollout_value(m, policies[k], 0, x0), 1e-12);
        EXPECT_GE(row.inst_regret, -1e-10);
        acc += row.inst_regret;
        EXPECT_NEAR(row.cum_regret, acc, 1e-9);
        EXPECT_EQ(row.episode, static_cast<std::int64_t>(k) + 1);
    }
}

TEST(RunLearner, ZeroRewardMdpHasNoRegret) {
    const auto m = oracle::zero_reward_mdp(3, 3, 2);
    const auto p = value_iteration(m);
    LearnerConfig cfg;
    cfg.episodes = 200;
    Learner l(3, 3, 2, make_predictions({PredictionKind::noisy_distillation, 0.3}, p, 2), resolve_clip(cfg, p));
    for (const auto& r : run_learner(m, p, l).rows) EXPECT_EQ(r.cum_regret, 0.0);
}

TEST(Baseline, LearnsOverTime) {
    // Mean instantaneous regret over the last quartile is no larger than over
    // the first quartile, averaged over 10 seeds. With the default bonus scale
    // the ranges take far longer than 4000 episodes to shrink, so use a small one.
    double first = 0.0, last = 0.0;
    const std::int64_t K = 4000;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto m = random_mdp(seed, 3, 2, 2, 0.0);
        const auto p = value_iteration(m);
        LearnerConfig cfg = baseline_config(LearnerConfig{});
        cfg.episodes = K;
        cfg.seed = seed;
        cfg.c0 = 0.05;
        Learner l(3, 2, 2, p.q_star, resolve_clip(cfg, p));
        const auto ledger = run_learner(m, p, l);
        for (std::int64_t k = 0; k < K / 4; ++k) first += ledger.rows[k].inst_regret;
        for (std::int64_t k = 3 * K / 4; k < K; ++k) last += ledger.rows[k].inst_regret;
    }
    EXPECT_LE(last, first);
}

TEST(Config, ParsesFullExample) {
    const auto cfg = parse_config(small_config("/tmp/x"));
    EXPECT_EQ(cfg.episodes, 200);
    EXPECT_EQ(cfg.seeds, (std::vector<std::uint64_t>{1, 2}));
    ASSERT_EQ(cfg.algorithms.size(), 2u);
    EXPECT_EQ(cfg.algorithms[0].learner.schedule.kind, ScheduleKind::delta_incr);
    EXPECT_EQ(cfg.algorithms[0].learner.episodes, 200);
    EXPECT_EQ(cfg.algorithms[1].learner.schedule.kind, ScheduleKind::delta_const);
    EXPECT_EQ(cfg.algorithms[1].learner.schedule.regret_budget, 0.0);
}

TEST(Config, ErrorsNameTheField) {
    Json j = small_config("/tmp/x");
    j["algorithms"][0]["schedule"]["kind"] = "delta_sometimes";
    EXPECT_NE(config_error(j).find("algorithms[0].schedule.kind"), std::string::npos) << config_error(j);

    j = small_config("/tmp/x");
    j["algorithms"][1]["kind"] = "mystery";
    EXPECT_NE(config_error(j).find("algorithms[1].kind"), std::string::npos);

    j = small_config("/tmp/x");
    j["instance"].erase("states");
    EXPECT_NE(config_error(j).find("instance.states"), std::string::npos);

    j = small_config("/tmp/x");
    j["episodes"] = "many";
    EXPECT_NE(config_error(j).find("episodes"), std::string::npos);

    j = small_config("/tmp/x");
    j["typo"] = 1;
    EXPECT_NE(config_error(j).find("typo"), std::string::npos);

    j = small_config("/tmp/x");
    j["T"] = 399;
    EXPECT_NE(config_error(j).find("T"), std::string::npos);
    j["T"] = 400;
    EXPECT_EQ(config_error(j), "");

    j = small_config("/tmp/x");
    j["instance"] = Json{{"kind", "file"}, {"path", "/nonexistent/mdp.json"}};
    EXPECT_NE(config_error(j).find("file not found"), std::string::npos);

    j = small_config("/tmp/x");
    j["algorithms"][1]["name"] = "incr";
    EXPECT_NE(config_error(j).find("duplicate"), std::string::npos);
}

TEST(Config, SeedRange) {
    Json j = small_config("/tmp/x");
    j["seeds"] = Json{{"start", 5}, {"count", 3}};
    EXPECT_EQ(parse_config(j).seeds, (std::vector<std::uint64_t>{5, 6, 7}));
}

TEST(Config, LineNumbersOnSyntaxErrors) {
    const auto dir = scratch("syntax");
    const auto path = dir / "bad.json";
    std::ofstream(path) << "{\n  \"name\": \"x\",\n  \"episodes\": ,\n}\n";
    try {
        load_config(path.string());
        FAIL() << "expected a parse error";
    } catch (const InvalidArgument& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
}

TEST(Instance, MinGapResampling) {
    InstanceSpec s;
    s.states = 5;
    s.actions = 2;
    s.horizon = 2;
    s.seed = 3;
    s.min_gap = 0.05;
    const auto m = build_instance(s, 1);
    EXPECT_GE(*value_iteration(m).delta_min, 0.05);
    EXPECT_EQ(build_instance(s, 1).rewards, m.rewards);
    s.vary_with_seed = true;
    EXPECT_NE(build_instance(s, 1).rewards, build_instance(s, 2).rewards);
}

TEST(Experiment, DeterministicOutputs) {
    const auto a = scratch("det_a"), b = scratch("det_b");
    const auto ra = run_experiment(parse_config(small_config(a)), 2);
    const auto rb = run_experiment(parse_config(small_config(b)), 1);
    for (const char* f : {"incr__seed1.csv", "incr__seed2.csv", "base__seed1.csv", "base__seed2.csv",
                          "plotdata.csv", "summary.json"}) {
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    }
    const std::string csv = slurp(a / "incr__seed1.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "episode,cum_regret,inst_regret,delta_hat,n_sigma,n_tau");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 201);
    ASSERT_EQ(ra.runs.size(), 4u);
    EXPECT_EQ(ra.runs[0].algorithm, "incr");
    EXPECT_EQ(ra.runs[0].seed, 1u);
    EXPECT_EQ(ra.runs[3].algorithm, "base");
    EXPECT_EQ(ra.runs[3].seed, 2u);
    EXPECT_TRUE(ra.summary["instance"].contains("hardness"));
    EXPECT_TRUE(ra.summary["instance"]["predictions"]["incr"]["is_distillation"].get<bool>());
}

TEST(Experiment, ZeroEpisodes) {
    const auto dir = scratch("zero");
    Json j = small_config(dir);
    j["episodes"] = 0;
    j.erase("checkpoints");
    const auto res = run_experiment(parse_config(j));
    for (const auto& r : res.runs) EXPECT_TRUE(r.cum_regret.empty());
    EXPECT_EQ(slurp(dir / "incr__seed1.csv"), "episode,cum_regret,inst_regret,delta_hat,n_sigma,n_tau\n");
    EXPECT_TRUE(res.summary["instance"].contains("hardness"));
}

TEST(Experiment, TraceAndInvariantChecks) {
    const auto dir = scratch("trace");
    Json j = small_config(dir);
    j["trace"] = true;
    j["check_invariants"] = true;
    const auto res = run_experiment(parse_config(j));
    for (const auto& r : res.runs) EXPECT_EQ(r.invariant_violations, 0);
    const std::string trace = slurp(dir / "incr__seed1.trace.jsonl");
    EXPECT_EQ(std::count(trace.begin(), trace.end(), '\n'), 200 * 2);
    const Json first = Json::parse(trace.substr(0, trace.find('\n')));
    for (const char* k : {"k", "h", "x", "a", "tau", "sigma", "delta_hat", "branch"}) EXPECT_TRUE(first.contains(k));
}

TEST(Experiment, BanditAlgorithm) {
    const auto dir = scratch("bandit");
    Json j = Json::parse(R"({
      "instance": {"kind": "bandit_gap", "actions": 3, "delta": 0.2},
      "episodes": 300, "seeds": [1],
      "algorithms": [{"name": "b", "kind": "bandit", "lambda": 0.1, "predictions": {"kind": "exact"}}]
    })");
    j["output"] = dir.string();
    const auto res = run_experiment(parse_config(j));
    ASSERT_EQ(res.runs[0].cum_regret.size(), 300u);
    const std::string csv = slurp(dir / "b__seed1.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "step,arm,reward,inst_gap,cum_regret");
    const auto back = load_run_dir(dir.string());
    ASSERT_EQ(back.size(), 1u);
    ASSERT_EQ(back[0].cum_regret.size(), res.runs[0].cum_regret.size());
    // The CSV keeps 12 significant digits.
    for (std::size_t i = 0; i < back[0].cum_regret.size(); ++i)
        EXPECT_NEAR(back[0].cum_regret[i], res.runs[0].cum_regret[i], 1e-9);
}

TEST(PlotData, SingleCheckpoint) {
    RunResult r;
    r.algorithm = "a";
    r.seed = 3;
    r.cum_regret = {0.5, 0.7, 1.5};
    const auto rows = emit_plot_data({r}, {1});
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].episode, 1);
    EXPECT_EQ(rows[0].cum_regret, 0.5);
}

TEST(PlotData, ClipsWithWarning) {
    RunResult r;
    r.algorithm = "a";
    r.cum_regret = {0.5, 0.7, 1.5};
    std::vector<std::string> warnings;
    const auto rows = emit_plot_data({r}, {2, 10}, &warnings);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[1].episode, 3);
    EXPECT_EQ(rows[1].cum_regret, 1.5);
    EXPECT_EQ(warnings.size(), 1u);
}

TEST(PlotData, RowCountAndRoundTrip) {
    const auto dir = scratch("plot");
    const auto res = run_experiment(parse_config(small_config(dir)));
    const std::vector<std::int64_t> cps{1, 50, 200};
    const auto rows = emit_plot_data(load_run_dir(dir.string()), cps);
    EXPECT_EQ(rows.size(), 2u * 2u * cps.size());
    const auto direct = emit_plot_data(res.runs, cps);
    // load_run_dir sorts by name; compare as sets of lines.
    std::vector<std::string> x, y;
    for (const auto& r : rows) x.push_back(plot_csv({r}));
    for (const auto& r : direct) y.push_back(plot_csv({r}));
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    EXPECT_EQ(x, y);
}

TEST(Checkpoints, DefaultSpacing) {
    EXPECT_EQ(default_checkpoints(100, 4), (std::vector<std::int64_t>{25, 50, 75, 100}));
    EXPECT_EQ(default_checkpoints(3, 10), (std::vector<std::int64_t>{1, 2, 3}));
    EXPECT_TRUE(default_checkpoints(0).empty());
}
