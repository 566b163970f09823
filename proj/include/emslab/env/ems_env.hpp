#pragma once
#include <array>
#include <functional>

#include "emslab/cycle/drive_cycle.hpp"
#include "emslab/rl/per_buffer.hpp"
#include "emslab/sim/powertrain.hpp"
#include "emslab/vehicle/vehicle.hpp"

namespace emslab::env {

/// Reward shaping: r = -alpha1 * p_achieved_kw
///                     -alpha2 * [achieved speed missed the cycle speed]
///                     -alpha3 * [(soc_ref - soc) > beta]
struct RewardParams {
    double alpha1 = 1.5;
    double alpha2 = 10.0;
    double alpha3 = 0.1;
    double beta = 0.15;
    double soc_ref = 0.65;
};

void validate_reward(const RewardParams& r);

/// Physical observation; normalize_obs() maps it to the agent's 4-vector.
struct EnvObs {
    double soc = 0.0;
    double s_cycle = 0.0;      // next target speed, m/s
    double a_cycle = 0.0;      // commanded acceleration, m/s^2
    double s_achieved = 0.0;   // current achieved speed, m/s
};

/// Bounded inputs for the tanh networks: SOC as-is, speeds / 40 m/s,
/// acceleration / 5 m/s^2.
std::array<double, 4> normalize_obs(const EnvObs& o);

struct EnvStep {
    EnvObs obs;
    double reward = 0.0;
    bool done = false;
    sim::StepResult info;
};

/// Gym-style wrapper around the powertrain simulation: one episode is one
/// pass over the drive cycle; constraint violations show up as penalties,
/// never as early termination.
class EmsEnv {
public:
    EmsEnv(const vehicle::VehicleParams& v, const cycle::DriveCycle& c,
           const RewardParams& r);

    EnvObs reset();

    /// Advance one step with the ICE power share in [0,1]. Throws
    /// Error(usage) after the episode is done, Error(argument) for an
    /// out-of-range action.
    EnvStep step(double action);

    bool done() const { return done_; }
    std::size_t steps_per_episode() const { return cyc_.size() - 1; }
    const sim::SimState& state() const { return state_; }
    const cycle::DriveCycle& drive_cycle() const { return cyc_; }
    const vehicle::VehicleParams& vehicle_params() const { return veh_; }
    const RewardParams& reward_params() const { return rew_; }

    /// Trace of the episode so far (totals reflect the steps taken).
    sim::Trace trace() const;

    static double reward_for(const RewardParams& r, const sim::StepResult& s);

private:
    EnvObs observe() const;

    vehicle::VehicleParams veh_;
    cycle::DriveCycle cyc_;
    RewardParams rew_;
    sim::SimState state_;
    std::vector<sim::StepResult> steps_;
    bool done_ = true;
};

using Policy = std::function<double(const EnvObs&)>;

struct EpisodeResult {
    std::vector<rl::Transition> transitions;  // normalized states
    double episode_return = 0.0;              // undiscounted reward sum
    sim::Trace trace;
};

/// Roll one full cycle with the given policy.
EpisodeResult episode(EmsEnv& env, const Policy& policy);

} // namespace emslab::env
