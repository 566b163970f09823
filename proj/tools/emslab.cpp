#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "emslab/cycle/drive_cycle.hpp"
#include "emslab/errors.hpp"
#include "emslab/harness/experiment.hpp"
#include "emslab/kernels/kernels.hpp"
#include "emslab/sim/trace_io.hpp"
#include "emslab/vehicle/vehicle.hpp"

namespace {

using namespace emslab;

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

int run(int argc, char** argv) {
    CLI::App app{"emslab - HEV energy-management strategies on a lightweight "
                 "powertrain simulator"};
    app.require_subcommand(1);

    // ---- cycle ----
    auto* cycle_cmd = app.add_subcommand("cycle", "drive-cycle utilities");
    cycle_cmd->require_subcommand(1);

    auto* stats_cmd = cycle_cmd->add_subcommand("stats", "print cycle statistics");
    std::string stats_file;
    stats_cmd->add_option("file", stats_file, "cycle CSV")->required();

    auto* gen_cmd = cycle_cmd->add_subcommand("gen", "generate a cycle");
    std::string gen_mode, gen_out, gen_sources, gen_window;
    double gen_sigma = 0.0;
    std::uint64_t gen_seed = 0;
    gen_cmd->add_option("--mode", gen_mode, "noise|concat|crop")->required();
    gen_cmd->add_option("--seed", gen_seed, "generator seed");
    gen_cmd->add_option("--out", gen_out, "output CSV")->required();
    gen_cmd->add_option("--sources", gen_sources, "comma-separated source CSVs")
        ->required();
    gen_cmd->add_option("--sigma", gen_sigma, "noise std in m/s");
    gen_cmd->add_option("--window", gen_window, "crop window start_s,end_s");

    // ---- train ----
    auto* train_cmd = app.add_subcommand("train", "train the DDPG strategy");
    std::string train_config;
    std::int64_t seed_override = -1;
    train_cmd->add_option("-c,--config", train_config, "experiment config JSON")
        ->required();
    train_cmd->add_option("--seed", seed_override, "override the config seed");

    // ---- eval ----
    auto* eval_cmd = app.add_subcommand("eval", "greedy evaluation of a strategy");
    std::string eval_ckpt, eval_vehicle, eval_cycle, eval_out = "eval_out";
    std::string eval_strategy = "rl";
    eval_cmd->add_option("--ckpt", eval_ckpt, "agent checkpoint JSON");
    eval_cmd->add_option("--vehicle", eval_vehicle, "vehicle config JSON")
        ->required();
    eval_cmd->add_option("--cycle", eval_cycle, "cycle CSV")->required();
    eval_cmd->add_option("--out", eval_out, "output directory");
    eval_cmd->add_option("--strategy", eval_strategy, "rl|rule");

    // ---- transfer ----
    auto* transfer_cmd =
        app.add_subcommand("transfer", "evaluate RL + rule-based across cycles");
    std::string tr_ckpt, tr_vehicle, tr_cycles, tr_out = "transfer_out";
    transfer_cmd->add_option("--ckpt", tr_ckpt, "agent checkpoint JSON")
        ->required();
    transfer_cmd->add_option("--vehicle", tr_vehicle, "vehicle config JSON")
        ->required();
    transfer_cmd
        ->add_option("--cycles", tr_cycles, "comma-separated cycle CSVs")
        ->required();
    transfer_cmd->add_option("--out", tr_out, "output directory");

    // ---- compare ----
    auto* compare_cmd =
        app.add_subcommand("compare", "plot-ready columns from exported runs");
    std::string cmp_runs, cmp_out = "compare.csv";
    compare_cmd
        ->add_option("--runs", cmp_runs,
                     "comma-separated run directories (trace.csv+summary.json)")
        ->required();
    compare_cmd->add_option("--out", cmp_out, "output CSV");

    auto* backend_cmd =
        app.add_subcommand("backend", "print the selected kernel backend");

    CLI11_PARSE(app, argc, argv);

    if (*stats_cmd) {
        const auto c = cycle::load_cycle(stats_file);
        const auto s = cycle::cycle_stats(c);
        std::printf("samples:        %zu\n", c.size());
        std::printf("dt_s:           %g\n", c.dt);
        std::printf("duration_s:     %g\n", s.duration_s);
        std::printf("distance_m:     %.1f\n", s.distance_m);
        std::printf("mean_speed_mps: %.3f\n", s.mean_speed);
        std::printf("max_speed_mps:  %.3f\n", s.max_speed);
        std::printf("max_accel_mps2: %.3f\n", s.max_accel);
        std::printf("idle_fraction:  %.3f\n", s.idle_fraction);
    } else if (*gen_cmd) {
        cycle::GeneratorSpec spec;
        spec.seed = gen_seed;
        spec.noise_sigma = gen_sigma;
        if (gen_mode == "noise") {
            spec.mode = cycle::GenMode::noise;
        } else if (gen_mode == "concat") {
            spec.mode = cycle::GenMode::concat;
        } else if (gen_mode == "crop") {
            spec.mode = cycle::GenMode::crop;
        } else {
            fail(ErrorCategory::argument, "unknown mode: " + gen_mode);
        }
        if (!gen_window.empty()) {
            const auto parts = split_list(gen_window);
            if (parts.size() != 2)
                fail(ErrorCategory::argument, "--window wants start_s,end_s");
            spec.crop_start_s = std::stod(parts[0]);
            spec.crop_end_s = std::stod(parts[1]);
        }
        cycle::CycleLibrary lib;
        for (const auto& src : split_list(gen_sources)) {
            const std::string key = std::filesystem::path(src).stem().string();
            lib[key] = cycle::load_cycle(src);
            spec.sources.push_back(key);
        }
        const auto generated = cycle::generate_cycle(spec, lib);
        cycle::save_cycle(generated, gen_out);
        std::printf("wrote %s (%zu samples, %.0f s)\n", gen_out.c_str(),
                    generated.size(), generated.duration_s());
    } else if (*train_cmd) {
        harness::ExperimentConfig cfg = harness::load_experiment(train_config);
        if (seed_override >= 0)
            cfg.seed = static_cast<std::uint64_t>(seed_override);
        const auto result = harness::train(cfg);
        std::printf("trained %zu episodes; checkpoint: %s\n",
                    result.episodes.size(), result.checkpoint_path.c_str());
        for (const auto& ep : result.episodes) {
            std::printf("  ep %2d  return %12.2f  energy %8.3f kWh  misses %zu\n",
                        ep.episode, ep.episode_return, ep.total_energy_kwh,
                        ep.speed_miss_steps);
        }
    } else if (*eval_cmd) {
        const auto veh = vehicle::load_vehicle(eval_vehicle);
        const auto cyc = cycle::load_cycle(eval_cycle);
        env::RewardParams reward;
        harness::EvalSummary s;
        if (eval_strategy == "rule") {
            s = harness::evaluate_rule_based(veh, cyc, reward, eval_out);
        } else if (eval_strategy == "rl") {
            if (eval_ckpt.empty())
                fail(ErrorCategory::argument, "--ckpt is required for --strategy rl");
            s = harness::evaluate_checkpoint(eval_ckpt, veh, cyc, reward, eval_out);
        } else {
            fail(ErrorCategory::argument, "unknown strategy: " + eval_strategy);
        }
        std::printf("%s on %s: %.3f kWh, %zu speed misses, final SOC %.3f\n",
                    s.strategy.c_str(), s.cycle.c_str(), s.total_energy_kwh,
                    s.speed_miss_steps, s.final_soc);
    } else if (*transfer_cmd) {
        const auto veh = vehicle::load_vehicle(tr_vehicle);
        env::RewardParams reward;
        const auto table = harness::transfer(tr_ckpt, veh,
                                             split_list(tr_cycles), reward, tr_out);
        std::printf("wrote %s/result_table.csv (%zu rows)\n", tr_out.c_str(),
                    table.rows.size());
    } else if (*compare_cmd) {
        harness::compare_plotdata(split_list(cmp_runs), cmp_out);
        std::printf("wrote %s\n", cmp_out.c_str());
    } else if (*backend_cmd) {
        std::printf("%s\n", kernels::backend_name(kernels::active_backend()));
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const emslab::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return static_cast<int>(e.category());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
