#pragma once
#include <optional>
#include <string>
#include <vector>

#include "emslab/env/ems_env.hpp"
#include "emslab/rl/ddpg.hpp"

namespace emslab::harness {

struct ExperimentConfig {
    std::string vehicle_path;
    std::string train_cycle;
    std::vector<std::string> eval_cycles;
    int episodes = 10;
    std::uint64_t seed = 0;
    std::string output_dir;
    env::RewardParams reward;
    rl::DdpgConfig agent;
    int warmup_episodes = 1;  // episodes rolled before gradient updates start
    int updates_per_step = 1; // gradient updates per environment step
};

/// Parse the experiment JSON; every agent/reward field is optional and
/// defaults to the library value. Paths are resolved relative to the config
/// file's directory and must exist.
ExperimentConfig load_experiment(const std::string& path);

struct EpisodeLog {
    int episode = 0;
    double episode_return = 0.0;
    double total_energy_kwh = 0.0;
    std::size_t speed_miss_steps = 0;
    double final_soc = 0.0;
    double noise_sigma = 0.0;
    double critic_loss = 0.0;
};

struct TrainResult {
    std::vector<EpisodeLog> episodes;
    std::string checkpoint_path;  // last good checkpoint
    std::string log_path;
};

/// Run the training loop: one exploration episode at a time, one DDPG
/// update per environment step once the warmup episode has filled the
/// buffer. Appends one JSON line per episode to <output_dir>/train_log.jsonl
/// and writes checkpoint_ep<N>.json plus checkpoint_latest.json after every
/// episode. On divergence, aborts but keeps the last good checkpoint.
TrainResult train(const ExperimentConfig& cfg);

struct EvalSummary {
    std::string strategy;
    std::string cycle;
    double total_energy_kwh = 0.0;
    std::size_t speed_miss_steps = 0;
    double final_soc = 0.0;
    double episode_return = 0.0;
    double distance_m = 0.0;
};

/// Greedy rollout of a checkpointed agent (dropout off, no noise); exports
/// trace.csv + summary.json into out_dir when it is non-empty.
EvalSummary evaluate_checkpoint(const std::string& checkpoint_path,
                                const vehicle::VehicleParams& veh,
                                const cycle::DriveCycle& cyc,
                                const env::RewardParams& reward,
                                const std::string& out_dir);

/// The rule-based baseline through the same rollout/export path.
EvalSummary evaluate_rule_based(const vehicle::VehicleParams& veh,
                                const cycle::DriveCycle& cyc,
                                const env::RewardParams& reward,
                                const std::string& out_dir);

struct ResultTable {
    std::vector<EvalSummary> rows;  // one per (strategy, cycle)
};

/// Evaluate the checkpoint and the rule-based baseline on every cycle;
/// writes result_table.csv and a human-readable table.txt under out_dir,
/// plus per-run trace exports in <out_dir>/<strategy>_<cyclename>/.
ResultTable transfer(const std::string& checkpoint_path,
                     const vehicle::VehicleParams& veh,
                     const std::vector<std::string>& cycle_paths,
                     const env::RewardParams& reward,
                     const std::string& out_dir);

void write_result_table(const ResultTable& t, const std::string& csv_path,
                        const std::string& txt_path);

/// Align exported traces of the same cycle into one plot-ready CSV
/// (cumulative energy per strategy and the target-minus-achieved speed
/// series). Throws Error(argument) when the traces disagree on the cycle.
void compare_plotdata(const std::vector<std::string>& run_dirs,
                      const std::string& out_csv);

} // namespace emslab::harness
