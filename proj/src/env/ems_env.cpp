#include "emslab/env/ems_env.hpp"

#include <cmath>

#include "emslab/errors.hpp"

namespace emslab::env {

namespace {
constexpr double kSpeedScale = 40.0;  // m/s
constexpr double kAccelScale = 5.0;   // m/s^2
} // namespace

void validate_reward(const RewardParams& r) {
    if (!(r.alpha1 >= 0.0) || !(r.alpha2 >= 0.0) || !(r.alpha3 >= 0.0))
        fail(ErrorCategory::validation, "reward coefficients must be >= 0");
    if (!(r.beta > 0.0))
        fail(ErrorCategory::validation, "reward beta must be > 0");
    if (!(r.soc_ref > 0.0) || !(r.soc_ref < 1.0))
        fail(ErrorCategory::validation, "soc_ref must be in (0,1)");
}

std::array<double, 4> normalize_obs(const EnvObs& o) {
    return {o.soc, o.s_cycle / kSpeedScale, o.a_cycle / kAccelScale,
            o.s_achieved / kSpeedScale};
}

EmsEnv::EmsEnv(const vehicle::VehicleParams& v, const cycle::DriveCycle& c,
               const RewardParams& r)
    : veh_(v), cyc_(c), rew_(r) {
    if (c.size() < 2)
        fail(ErrorCategory::validation, "cycle too short for an episode");
    validate_reward(r);
}

EnvObs EmsEnv::observe() const {
    EnvObs o;
    o.soc = state_.soc;
    o.s_achieved = state_.v_achieved;
    const std::size_t i = state_.step_index;
    if (i + 1 < cyc_.size()) {
        o.s_cycle = cyc_.speed[i + 1];
        o.a_cycle = (cyc_.speed[i + 1] - cyc_.speed[i]) / cyc_.dt;
    } else {
        // terminal observation: the cycle has no further command
        o.s_cycle = cyc_.speed.back();
        o.a_cycle = 0.0;
    }
    return o;
}

EnvObs EmsEnv::reset() {
    state_ = sim::SimState{};
    state_.soc = veh_.battery.soc_initial;
    steps_.clear();
    done_ = false;
    return observe();
}

double EmsEnv::reward_for(const RewardParams& r, const sim::StepResult& s) {
    double reward = -r.alpha1 * s.p_achieved_kw;
    if (s.speed_miss) reward -= r.alpha2;
    if (r.soc_ref - s.soc > r.beta) reward -= r.alpha3;
    return reward;
}

EnvStep EmsEnv::step(double action) {
    if (done_) fail(ErrorCategory::usage, "step() after the episode is done");
    if (!(action >= 0.0) || !(action <= 1.0))
        fail(ErrorCategory::argument, "action must be in [0,1]");

    const std::size_t i = state_.step_index;
    const sim::StepResult res = sim::step(state_, veh_, cyc_.speed[i + 1],
                                          cyc_.grade[i + 1], cyc_.dt, action);
    steps_.push_back(res);
    done_ = state_.step_index + 1 >= cyc_.size();

    EnvStep out;
    out.obs = observe();
    out.reward = reward_for(rew_, res);
    out.done = done_;
    out.info = res;
    return out;
}

sim::Trace EmsEnv::trace() const {
    sim::Trace t;
    t.steps = steps_;
    t.dt = cyc_.dt;
    t.soc_initial = veh_.battery.soc_initial;
    t.capacity_kwh = veh_.battery.capacity_kwh;
    t.final_soc = state_.soc;
    t.speed_miss_steps = state_.speed_miss_count;
    for (const auto& s : steps_) t.distance_m += s.v_achieved * cyc_.dt;
    t.total_energy_kwh =
        state_.cum_fuel_kwh +
        (veh_.battery.soc_initial - state_.soc) * veh_.battery.capacity_kwh;
    return t;
}

EpisodeResult episode(EmsEnv& env, const Policy& policy) {
    EpisodeResult out;
    EnvObs obs = env.reset();
    out.transitions.reserve(env.steps_per_episode());
    while (!env.done()) {
        const double a = policy(obs);
        const EnvStep s = env.step(a);
        rl::Transition t;
        t.state = normalize_obs(obs);
        t.action = a;
        t.reward = s.reward;
        t.next_state = normalize_obs(s.obs);
        t.done = s.done;
        out.transitions.push_back(t);
        out.episode_return += s.reward;
        obs = s.obs;
    }
    out.trace = env.trace();
    return out;
}

} // namespace emslab::env
