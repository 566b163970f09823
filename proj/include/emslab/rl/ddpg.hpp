#pragma once
#include <array>
#include <string>

#include "emslab/rl/mlp.hpp"
#include "emslab/rl/per_buffer.hpp"

namespace emslab::rl {

/// All DDPG hyperparameters with their working defaults. Every field can be
/// overridden from the experiment config.
struct DdpgConfig {
    std::vector<std::size_t> actor_hidden{100, 100};
    std::vector<std::size_t> critic_hidden{100, 100, 50};
    double dropout_rate = 0.1;      // critic only (MC dropout)
    double gamma = 0.99;
    double tau = 0.005;
    double actor_lr = 1e-4;
    double critic_lr = 1e-3;
    double noise_sigma = 0.3;       // initial exploration std
    double noise_decay = 0.95;      // multiplied in per episode
    int mc_passes = 4;              // dropout passes averaged for the target
    std::size_t batch_size = 64;
    std::size_t buffer_capacity = std::size_t{1} << 17;
    double alpha_per = 0.6;
    double beta_per_initial = 0.4;
    double beta_per_final = 1.0;
    double epsilon_per = 1e-3;
};

struct UpdateStats {
    double critic_loss = 0.0;
    double actor_loss = 0.0;              // -mean Q(s, actor(s))
    std::vector<double> td_errors;        // |y - Q(s,a)| per batch item
};

/// DDPG with target networks and an MC-dropout critic. Observations are the
/// normalized 4-vector (soc, s_cycle, a_cycle, s_achieved); the single
/// action is the ICE power share in [0,1].
class DdpgAgent {
public:
    DdpgAgent(const DdpgConfig& cfg, std::uint64_t seed);

    /// Greedy policy (dropout off): (tanh-output + 1) / 2 in [0,1]. With
    /// explore, Gaussian noise of the current sigma is added then clamped.
    double act(const std::array<double, 4>& obs, bool explore);

    /// One gradient step on critic and actor from a PER batch, then soft
    /// target updates. Returns per-item |TD error| for priority refresh.
    /// Throws Error(divergence) on non-finite losses or parameters.
    UpdateStats update(const std::vector<Transition>& batch,
                       const std::vector<double>& is_weights);

    void decay_noise() { noise_sigma_ *= cfg_.noise_decay; }
    double noise_sigma() const { return noise_sigma_; }
    const DdpgConfig& config() const { return cfg_; }
    const Mlp& actor() const { return actor_; }
    const Mlp& critic() const { return critic_; }
    std::int64_t update_count() const { return update_count_; }

    /// Versioned JSON checkpoint: shapes, parameters, optimizer moments,
    /// target nets, RNG state, noise level. load() rejects shape mismatches.
    void save(const std::string& path) const;
    static DdpgAgent load(const std::string& path);

    /// Mean of mc_passes dropout-on target-critic evaluations (exposed for
    /// the variance-scaling test).
    double target_q(const std::array<double, 4>& next_state, int passes);

private:
    DdpgAgent() = default;

    double greedy_action(const Mlp& actor_net,
                         const std::array<double, 4>& obs) const;

    DdpgConfig cfg_;
    Mlp actor_, critic_, target_actor_, target_critic_;
    AdamState opt_actor_, opt_critic_;
    std::mt19937_64 rng_;
    double noise_sigma_ = 0.3;
    std::int64_t update_count_ = 0;
};

} // namespace emslab::rl
