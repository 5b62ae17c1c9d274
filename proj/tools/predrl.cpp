#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "predrl/experiment.hpp"

using namespace predrl;

namespace {

// "1,2,5" or "1-10" or a mix of both.
std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = text.find(',', pos);
        const std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (!item.empty()) {
            const std::size_t dash = item.find('-');
            if (dash == std::string::npos) {
                out.push_back(std::stoull(item));
            } else {
                const auto lo = std::stoull(item.substr(0, dash));
                const auto hi = std::stoull(item.substr(dash + 1));
                if (hi < lo) throw InvalidArgument("bad seed range '" + item + "'");
                for (auto s = lo; s <= hi; ++s) out.push_back(s);
            }
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (out.empty()) throw InvalidArgument("empty seed list");
    return out;
}

std::vector<std::int64_t> parse_checkpoints(const std::string& text) {
    std::vector<std::int64_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stoll(item));
    }
    return out;
}

TabularMdp load_instance(const std::string& path) {
    const Json j = read_json_file(path);
    // Either a raw MDP document or an experiment config with an instance block.
    if (j.contains("transitions")) return mdp_from_json(j);
    const ExperimentConfig cfg = parse_config(j, std::filesystem::path(path).parent_path().string());
    return build_instance(cfg.instance, cfg.seeds.empty() ? 0 : cfg.seeds.front());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Prediction-augmented tabular Q-learning experiments"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "execute an experiment config");
    std::string config_path, seeds_text, out_dir;
    int jobs = 1;
    bool trace = false, check = false;
    run->add_option("config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    run->add_option("--seeds", seeds_text, "seed list, e.g. 1,2,3 or 1-20");
    run->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    run->add_option("--out", out_dir, "output directory");
    run->add_flag("--trace", trace, "write a per-step learner trace per run");
    run->add_flag("--check-invariants", check, "check exact learner invariants every episode");

    auto* analyze = app.add_subcommand("analyze", "hardness report and prediction classification");
    std::string instance_path, pred_kind = "exact", pred_path;
    double lambda = 0.5, eps_prime = 0.1, dist_eps = 0.0, eta = 0.0, shift = 0.0;
    double horizon_steps = 0.0;
    std::optional<double> delta_tilde;
    std::uint64_t pred_seed = 1;
    analyze->add_option("instance", instance_path, "MDP file or experiment config")->required()->check(CLI::ExistingFile);
    analyze->add_option("--prediction-kind", pred_kind, "exact|flat_misleading|single_wrong_suboptimal|noisy_distillation|adversarial_low_optimal");
    analyze->add_option("--predictions", pred_path, "prediction table file ([h][x][a])")->check(CLI::ExistingFile);
    analyze->add_option("--eta", eta, "noise scale for noisy_distillation");
    analyze->add_option("--c", shift, "shift for adversarial_low_optimal");
    analyze->add_option("--seed", pred_seed, "seed for randomized predictions");
    analyze->add_option("--lambda", lambda, "lambda in (0,1]");
    analyze->add_option("--T", horizon_steps, "total steps K*H")->required();
    analyze->add_option("--eps-prime", eps_prime, "fooling set level");
    analyze->add_option("--distillation-eps", dist_eps, "distillation tolerance");
    analyze->add_option("--delta-tilde", delta_tilde, "gap lower bound for the variant cost");

    auto* solve = app.add_subcommand("solve", "dump Q*, V* and gaps");
    std::string solve_path;
    solve->add_option("instance", solve_path, "MDP file or experiment config")->required()->check(CLI::ExistingFile);

    auto* plot = app.add_subcommand("plotdata", "long-format cumulative regret table from a run directory");
    std::string run_dir, cps_text;
    plot->add_option("run-dir", run_dir, "directory written by 'run'")->required()->check(CLI::ExistingDirectory);
    plot->add_option("--checkpoints", cps_text, "comma-separated episodes (default: 10 evenly spaced)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            ExperimentConfig cfg = load_config(config_path);
            if (!seeds_text.empty()) cfg.seeds = parse_seed_list(seeds_text);
            if (!out_dir.empty()) cfg.output_dir = out_dir;
            cfg.trace = cfg.trace || trace;
            cfg.check_invariants = cfg.check_invariants || check;
            const ExperimentResult res = run_experiment(cfg, jobs);
            std::cout << "wrote " << res.runs.size() << " run(s) to " << cfg.output_dir << '\n';
            if (cfg.check_invariants) {
                std::int64_t v = 0;
                for (const auto& r : res.runs) v += r.invariant_violations;
                std::cout << "invariant violations: " << v << '\n';
                if (v != 0) return 3;
            }
        } else if (*analyze) {
            const TabularMdp mdp = load_instance(instance_path);
            const OptimalProfile profile = value_iteration(mdp);
            PredictionTable preds;
            if (!pred_path.empty()) {
                const Json j = read_json_file(pred_path);
                preds = table_from_json(j.contains("q_tilde") ? j.at("q_tilde") : j, mdp.horizon, mdp.num_states,
                                        mdp.num_actions);
            } else {
                PredictionSpec ps;
                ps.kind = parse_prediction_kind(pred_kind);
                ps.eta = eta;
                ps.c = shift;
                preds = make_predictions(ps, profile, pred_seed);
            }
            AnalysisSpec as;
            as.lambda = lambda;
            as.eps_prime = eps_prime;
            as.distillation_eps = dist_eps;
            as.delta_tilde = delta_tilde;
            const auto fool = fooling_set(preds, profile, eps_prime / 2.0, eps_prime);
            const auto terms = fooling_regret_terms(profile, fool, horizon_steps, eps_prime);
            Json out = {{"hardness", hardness_json(lambda_cost(profile, horizon_steps, lambda, delta_tilde))},
                        {"predictions", classify_predictions(preds, profile, as)},
                        {"fooling_terms",
                         {{"sqrt_term", terms.sqrt_term},
                          {"gap_term", terms.gap_term.is_infinite() ? Json("inf") : Json(terms.gap_term.value())}}}};
            std::cout << out.dump(2) << '\n';
        } else if (*solve) {
            const TabularMdp mdp = load_instance(solve_path);
            std::cout << profile_json(value_iteration(mdp)).dump(2) << '\n';
        } else if (*plot) {
            const auto runs = load_run_dir(run_dir);
            if (runs.empty()) throw InvalidArgument("no per-run CSV files in " + run_dir);
            std::size_t longest = 0;
            for (const auto& r : runs) longest = std::max(longest, r.cum_regret.size());
            const auto cps = cps_text.empty() ? default_checkpoints(static_cast<std::int64_t>(longest))
                                              : parse_checkpoints(cps_text);
            std::vector<std::string> warnings;
            const auto rows = emit_plot_data(runs, cps, &warnings);
            for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
            std::cout << plot_csv(rows);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
