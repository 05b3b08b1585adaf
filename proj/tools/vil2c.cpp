// Experiment front door: train / eval / sweep / verify subcommands around
// the simulator, trainer, and numerical verifiers.
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vil2c/allocator.hpp"
#include "vil2c/config.hpp"
#include "vil2c/gradcheck.hpp"
#include "vil2c/sim.hpp"
#include "vil2c/theory.hpp"
#include "vil2c/trainer.hpp"

namespace fs = std::filesystem;
using namespace vil2c;

namespace {

config::ScenarioConfig load_or_default(const std::string& path) {
    if (path.empty()) return config::parse_config(config::default_config_json());
    return config::load_config(path);
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

struct EvalSummary {
    double return_mean = 0.0, return_std = 0.0;
    double wait_mean = 0.0, latency_mean = 0.0;
    double delivery_mean = 0.0, success_mean = 0.0;
};

EvalSummary summarize(const std::vector<sim::EpisodeTrace>& traces) {
    EvalSummary s;
    double sq = 0.0;
    for (const auto& tr : traces) {
        s.return_mean += tr.undiscounted_return;
        sq += tr.undiscounted_return * tr.undiscounted_return;
        s.wait_mean += tr.mean_wait;
        s.latency_mean += tr.mean_latency;
        s.delivery_mean += tr.delivery_fraction;
        s.success_mean += tr.mean_success;
    }
    double n = (double)traces.size();
    s.return_mean /= n;
    s.return_std = std::sqrt(std::max(0.0, sq / n - s.return_mean * s.return_mean));
    s.wait_mean /= n;
    s.latency_mean /= n;
    s.delivery_mean /= n;
    s.success_mean /= n;
    return s;
}

int cmd_train(const std::string& config_path, const std::string& out_dir,
              std::optional<uint64_t> seed, std::optional<int> workers,
              std::optional<int> iterations) {
    config::ScenarioConfig cfg = load_or_default(config_path);
    if (seed) {
        cfg.seed = *seed;
        cfg.train.seed = *seed;
    }
    if (workers) cfg.train.workers = *workers;
    if (iterations) cfg.train.iterations = *iterations;

    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / "manifest.json",
               config::manifest_json(cfg, cfg.seed));
    write_file(fs::path(out_dir) / "config.json", config::canonical_json(cfg));

    train::Trainer trainer(cfg.sim, cfg.train);
    std::ofstream metrics(fs::path(out_dir) / "metrics.jsonl");
    trainer.train([&](const train::IterationMetrics& m) {
        std::string row = train::metrics_jsonl_row(m);
        metrics << row << "\n";
        metrics.flush();
        std::cout << row << "\n";
    });
    nets::save_checkpoint((fs::path(out_dir) / "checkpoint.txt").string(),
                          trainer.policies().all_params());
    std::cout << "wrote " << out_dir << "/{manifest.json,config.json,metrics.jsonl,checkpoint.txt}\n";
    return 0;
}

int cmd_eval(const std::string& config_path, const std::string& checkpoint,
             int episodes, std::optional<uint64_t> seed, const std::string& mode,
             int workers, const std::string& out_csv, const std::string& trace_out) {
    config::ScenarioConfig cfg = load_or_default(config_path);
    if (seed) cfg.seed = *seed;
    if (!mode.empty()) cfg.sim.mode = sim::mode_from_string(mode);

    sim::Simulator simulator(cfg.sim);
    sim::Policies policies = sim::Policies::make(cfg.sim, cfg.seed);
    if (!checkpoint.empty()) {
        auto params = policies.all_params();
        nets::load_checkpoint(checkpoint, params);
    }
    auto traces = sim::run_episodes(simulator, policies, cfg.seed, episodes, workers);

    std::ostringstream csv;
    csv << "episode," << sim::summary_csv_header() << "\n";
    for (size_t e = 0; e < traces.size(); ++e)
        csv << e << "," << sim::summary_csv_row(traces[e]) << "\n";
    if (!out_csv.empty())
        write_file(out_csv, csv.str());
    else
        std::cout << csv.str();

    if (!trace_out.empty()) {
        std::ostringstream jl;
        for (const auto& tr : traces) jl << sim::trace_to_jsonl(tr);
        write_file(trace_out, jl.str());
    }

    EvalSummary s = summarize(traces);
    std::cout << "mode=" << sim::mode_to_string(cfg.sim.mode) << " episodes=" << episodes
              << " return=" << s.return_mean << "+-" << s.return_std
              << " wait=" << s.wait_mean << " latency=" << s.latency_mean
              << " delivery=" << s.delivery_mean << " success=" << s.success_mean
              << "\n";
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& axis,
              std::vector<double> grid, const std::vector<std::string>& modes,
              int episodes, int train_iters, std::optional<uint64_t> seed,
              int workers, const std::string& out_csv) {
    config::ScenarioConfig base = load_or_default(config_path);
    if (seed) {
        base.seed = *seed;
        base.train.seed = *seed;
    }
    if (grid.empty()) {
        if (axis == "entropy_threshold") {
            // default: 9 evenly spaced thresholds over [0, log2 n_actions]
            double hi = std::log2((double)envs::kNumActions);
            for (int k = 0; k < 9; ++k) grid.push_back(hi * k / 8.0);
        } else {
            std::cerr << "sweep: --grid required for axis " << axis << "\n";
            return 1;
        }
    }
    std::sort(grid.begin(), grid.end());

    std::ostringstream csv;
    csv << "axis,value,mode,return_mean,return_std,wait_mean,latency_mean,"
           "delivery_mean,success_mean\n";
    for (double v : grid) {
        for (const std::string& mode_name : modes) {
            config::ScenarioConfig cfg = base;
            cfg.sim.mode = sim::mode_from_string(mode_name);
            if (axis == "bandwidth") cfg.sim.bandwidth_budget = v;
            else if (axis == "power") cfg.sim.power_budget = v;
            else if (axis == "pathloss") cfg.sim.chan.path_loss_exponent = v;
            else if (axis == "maxwait") cfg.sim.t_max = v;
            else if (axis == "entropy_threshold") cfg.sim.entropy_threshold = v;
            else {
                std::cerr << "sweep: unknown axis " << axis << "\n";
                return 1;
            }
            cfg.sim.validate();
            sim::Policies policies = sim::Policies::make(cfg.sim, cfg.seed);
            if (train_iters > 0) {
                cfg.train.iterations = train_iters;
                cfg.train.workers = workers;
                train::Trainer trainer(cfg.sim, cfg.train);
                trainer.train();
                policies = trainer.policies();
            }
            sim::Simulator simulator(cfg.sim);
            auto traces = sim::run_episodes(simulator, policies,
                                            derive_seed(cfg.seed, 0xE7A1), episodes,
                                            workers);
            EvalSummary s = summarize(traces);
            csv << axis << "," << v << "," << mode_name << "," << s.return_mean << ","
                << s.return_std << "," << s.wait_mean << "," << s.latency_mean << ","
                << s.delivery_mean << "," << s.success_mean << "\n";
            std::cout << axis << "=" << v << " mode=" << mode_name
                      << " return=" << s.return_mean << "+-" << s.return_std << "\n";
        }
    }
    if (!out_csv.empty())
        write_file(out_csv, csv.str());
    else
        std::cout << csv.str();
    return 0;
}

// ---- verification suites ------------------------------------------------

bool report(const std::string& name, bool ok, const std::string& detail = "") {
    std::cout << (ok ? "PASS " : "FAIL ") << name;
    if (!detail.empty()) std::cout << "  (" << detail << ")";
    std::cout << "\n";
    return ok;
}

bool verify_alloc(uint64_t seed) {
    bool all = true;
    Rng rng(seed);
    // Solver vs dense-grid oracle on two-link instances.
    {
        int agree = 0;
        const int n_cases = 30;
        for (int k = 0; k < n_cases; ++k) {
            alloc::AllocationProblem pr;
            pr.bandwidth_budget = 1e4;
            pr.power_budget = 1.0;
            for (int j = 0; j < 2; ++j) {
                pr.importances.push_back(rng.uniform(0.1, 3.0));
                pr.message_bits.push_back(256.0);
                channel::LinkState ls;
                ls.sender_id = 0;
                ls.recipient_id = j + 1;
                ls.distance = rng.uniform(1.0, 5.0);
                ls.path_loss_exponent = 2.0;
                ls.path_loss_offset = 45.0;
                ls.noise_density = 1e-9;
                pr.links.push_back(ls);
            }
            alloc::SolverOptions opts;
            opts.seed = derive_seed(seed, k);
            double solver = alloc::total_voi(pr, alloc::allocate_optimal(pr, opts).allocation);
            double oracle =
                alloc::total_voi(pr, alloc::brute_force_oracle(pr, 200).allocation);
            if (solver >= oracle * (1.0 - 1e-3) - 1e-12) ++agree;
        }
        all &= report("allocator matches dense-grid oracle on 2-link instances",
                      agree == 30, std::to_string(agree) + "/30");
    }
    // Objective ordering: optimal >= proportional and equal.
    {
        int ok = 0;
        const int n_cases = 100;
        for (int k = 0; k < n_cases; ++k) {
            int n = 2 + (int)(rng.uniform(0.0, 1.0) * 4);
            alloc::AllocationProblem pr;
            pr.bandwidth_budget = rng.uniform(1e3, 1e5);
            pr.power_budget = rng.uniform(0.1, 10.0);
            for (int j = 0; j < n; ++j) {
                pr.importances.push_back(rng.uniform(0.0, 3.0));
                pr.message_bits.push_back(rng.uniform(64.0, 1024.0));
                channel::LinkState ls;
                ls.sender_id = 0;
                ls.recipient_id = j + 1;
                ls.distance = rng.uniform(1.0, 8.0);
                ls.path_loss_exponent = rng.uniform(2.0, 4.0);
                ls.path_loss_offset = rng.uniform(30.0, 60.0);
                ls.noise_density = 1e-9;
                pr.links.push_back(ls);
            }
            alloc::SolverOptions opts;
            opts.seed = derive_seed(seed, 500 + k);
            double vo = alloc::total_voi(pr, alloc::allocate_optimal(pr, opts).allocation);
            double vp = alloc::total_voi(pr, alloc::allocate_proportional(pr));
            double ve = alloc::total_voi(pr, alloc::allocate_equal(pr));
            if (vo >= vp - 1e-9 && vo >= ve - 1e-9) ++ok;
        }
        all &= report("optimal allocation dominates proportional and equal splits",
                      ok == 100, std::to_string(ok) + "/100");
    }
    // Stationarity residuals on a solved interior instance.
    {
        alloc::AllocationProblem pr;
        pr.bandwidth_budget = 1e4;
        pr.power_budget = 1.0;
        for (int j = 0; j < 3; ++j) {
            pr.importances.push_back(1.0 + 0.3 * j);
            pr.message_bits.push_back(256.0);
            channel::LinkState ls;
            ls.sender_id = 0;
            ls.recipient_id = j + 1;
            ls.distance = 1.5 + j;
            ls.path_loss_exponent = 2.0;
            ls.path_loss_offset = 45.0;
            ls.noise_density = 1e-9;
            pr.links.push_back(ls);
        }
        alloc::SolverOptions opts;
        opts.seed = seed;
        auto res = alloc::allocate_optimal(pr, opts);
        auto diag = alloc::kkt_residuals(pr, res.allocation, {});
        double worst = 0.0;
        for (size_t j = 0; j < diag.residuals.size(); ++j) {
            if (!diag.active[j] || diag.boundary[j]) continue;
            worst = std::max(worst, std::abs(diag.residuals[j]));
        }
        all &= report("stationarity residuals finite at the solver optimum",
                      std::isfinite(worst), "worst " + std::to_string(worst));
    }
    return all;
}

bool verify_gradients(uint64_t seed) {
    bool all = true;
    sim::SimConfig scfg;
    scfg.env = envs::default_pp_config();
    scfg.env.n_agents = 3;
    scfg.env.observation_radii = {1.2, 1.6, 2.0};
    scfg.hidden_width = 8;
    scfg.key_width = 4;
    scfg.episode_length = 3;
    sim::Policies policies = sim::Policies::make(scfg, seed);
    sim::Simulator simulator(scfg);
    train::TrainConfig tcfg;
    auto traces = sim::run_episodes(simulator, policies, derive_seed(seed, 1), 2, 1);
    train::RolloutBatch batch = train::build_batch(simulator, policies, traces, tcfg);

    {
        nets::ParamList params;
        nets::append(params, nets::params_of(policies.policy.encoder, "encoder"));
        nets::append(params, nets::params_of(policies.policy.actor, "actor"));
        auto res = gradcheck::check(
            params, [&]() { return -train::mappo_actor_loss(batch, policies, tcfg, false); },
            [&]() { train::mappo_actor_loss(batch, policies, tcfg, true); }, 25, 1e-5,
            1e-4, derive_seed(seed, 2));
        all &= report("actor surrogate gradient (encoder + attention actor)", res.pass,
                      "max rel err " + std::to_string(res.max_rel_err));
    }
    {
        nets::ParamList params = nets::params_of(policies.critic, "critic");
        auto res = gradcheck::check(
            params, [&]() { return train::critic_loss(batch, policies, false); },
            [&]() { train::critic_loss(batch, policies, true); }, 25, 1e-5, 1e-4,
            derive_seed(seed, 3));
        all &= report("critic regression gradient", res.pass,
                      "max rel err " + std::to_string(res.max_rel_err));
    }
    {
        nets::ParamList params = policies.resonet_params();
        auto res = gradcheck::check(
            params,
            [&]() { return train::resonet_loss(batch, policies, scfg, tcfg, false); },
            [&]() { train::resonet_loss(batch, policies, scfg, tcfg, true); }, 25, 1e-6,
            1e-4, derive_seed(seed, 4));
        all &= report("allocation network gradient through the rate objective", res.pass,
                      "max rel err " + std::to_string(res.max_rel_err));
    }
    return all;
}

bool verify_theory(uint64_t seed) {
    bool all = true;
    theory::PairingScenario sc;
    auto aware = theory::simulate_allocation_pairing(sc, theory::PairingPolicy::VoiAware,
                                                     4000, seed);
    auto inherent = theory::simulate_allocation_pairing(
        sc, theory::PairingPolicy::Inherent, 4000, seed);
    theory::CovarianceGap ga = theory::covariance_gap(aware);
    theory::CovarianceGap gi = theory::covariance_gap(inherent);
    std::cout << "policy,gap,covariance,mc_error\n";
    std::cout << "voi_aware," << ga.gap << "," << ga.covariance << "," << ga.mc_error << "\n";
    std::cout << "equal_split," << gi.gap << "," << gi.covariance << "," << gi.mc_error
              << "\n";
    auto shuffled = aware;
    theory::shuffle_pairing(shuffled, derive_seed(seed, 9));
    theory::CovarianceGap gs = theory::covariance_gap(shuffled);
    std::cout << "shuffled," << gs.gap << "," << gs.covariance << "," << gs.mc_error << "\n";

    all &= report("effective return exceeds the independent product under voi-aware pairing",
                  ga.gap > 2.0 * ga.mc_error,
                  "gap " + std::to_string(ga.gap) + " +- " + std::to_string(ga.mc_error));
    all &= report("gap equals scaled sample covariance",
                  std::abs(ga.gap - ga.covariance * (4000 - 1.0) / 4000.0) <
                      1e-12 * std::max(1.0, std::abs(ga.gap)));
    all &= report("shuffling the pairing collapses the gap",
                  std::abs(gs.gap) < 5.0 * gs.mc_error);

    // Linear latency sensitivity on a small scenario.
    sim::SimConfig scfg;
    scfg.env = envs::default_pp_config();
    scfg.env.n_agents = 3;
    scfg.env.observation_radii = {1.2, 1.6, 2.0};
    scfg.hidden_width = 8;
    scfg.key_width = 4;
    scfg.episode_length = 5;
    // Gate above log2(n_actions): the first arrival terminates reception,
    // so the realized wait tracks the injected latency.
    scfg.entropy_threshold = 2.4;
    sim::Policies policies = sim::Policies::make(scfg, seed);
    auto sweep = theory::latency_bound_sweep(scfg, policies, {0.0, 0.1, 0.2, 0.3, 0.4},
                                             8, derive_seed(seed, 17), 2);
    std::cout << "injected_latency,mean_return\n";
    for (const auto& p : sweep.points)
        std::cout << p.injected_latency << "," << p.mean_return << "\n";
    all &= report("latency sensitivity constant is finite",
                  std::isfinite(sweep.fitted_c), "C " + std::to_string(sweep.fitted_c));
    return all;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Value-of-information latency-aware communication simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "run", checkpoint, mode, out_csv, trace_out;
    std::string axis, suite;
    std::vector<double> grid;
    std::vector<std::string> modes = {"vil2c"};
    int episodes = 16, workers = 1, train_iters = 0;
    std::optional<uint64_t> seed;
    std::optional<int> workers_opt, iters_opt;

    auto* t = app.add_subcommand("train", "Train policies and write metrics/checkpoint");
    t->add_option("--config", config_path, "Config JSON path (defaults when omitted)");
    t->add_option("--out", out_dir, "Output directory");
    t->add_option("--seed", seed, "Root seed override");
    t->add_option("--workers", workers_opt, "Rollout worker threads");
    t->add_option("--iterations", iters_opt, "Training iteration override");

    auto* e = app.add_subcommand("eval", "Evaluate a checkpoint and emit a summary CSV");
    e->add_option("--config", config_path, "Config JSON path");
    e->add_option("--checkpoint", checkpoint, "Checkpoint file (fresh nets when omitted)");
    e->add_option("--episodes", episodes, "Episode count");
    e->add_option("--seed", seed, "Evaluation seed override");
    e->add_option("--mode", mode, "Mode override: vil2c|fc|avg|nocomm");
    e->add_option("--workers", workers, "Rollout worker threads");
    e->add_option("--out", out_csv, "CSV output path (stdout when omitted)");
    e->add_option("--trace-out", trace_out, "Per-step JSONL trace output path");

    auto* s = app.add_subcommand("sweep", "Evaluate along one scenario axis");
    s->add_option("--config", config_path, "Config JSON path");
    s->add_option("--axis", axis, "bandwidth|power|pathloss|maxwait|entropy_threshold")
        ->required();
    s->add_option("--grid", grid, "Axis values (entropy axis defaults to 9 points)");
    s->add_option("--modes", modes, "Modes to compare");
    s->add_option("--episodes", episodes, "Episodes per point");
    s->add_option("--train-iters", train_iters, "Train this many iterations per point");
    s->add_option("--seed", seed, "Root seed override");
    s->add_option("--workers", workers, "Rollout worker threads");
    s->add_option("--out", out_csv, "CSV output path (stdout when omitted)");

    auto* v = app.add_subcommand("verify", "Run a numerical verification suite");
    v->add_option("--suite", suite, "alloc|theory|gradients")->required();
    v->add_option("--seed", seed, "Suite seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (t->parsed())
            return cmd_train(config_path, out_dir, seed, workers_opt, iters_opt);
        if (e->parsed())
            return cmd_eval(config_path, checkpoint, episodes, seed, mode, workers,
                            out_csv, trace_out);
        if (s->parsed())
            return cmd_sweep(config_path, axis, grid, modes, episodes, train_iters,
                             seed, workers, out_csv);
        if (v->parsed()) {
            uint64_t sd = seed.value_or(1);
            bool ok;
            if (suite == "alloc") ok = verify_alloc(sd);
            else if (suite == "gradients") ok = verify_gradients(sd);
            else if (suite == "theory") ok = verify_theory(sd);
            else {
                std::cerr << "verify: unknown suite " << suite << "\n";
                return 1;
            }
            return ok ? 0 : 2;
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 1;
}
