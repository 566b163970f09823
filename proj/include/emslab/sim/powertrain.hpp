#pragma once
#include <functional>
#include <vector>

#include "emslab/cycle/drive_cycle.hpp"
#include "emslab/vehicle/vehicle.hpp"

namespace emslab::sim {

constexpr double kAirDensity = 1.2;    // kg/m^3
constexpr double kGravity = 9.81;      // m/s^2
constexpr double kSpeedTol = 0.01;     // m/s; floating-point reading of a strict miss
constexpr double kEngineMinKw = 0.5;   // requested ICE power below this snaps to off

struct SimState {
    std::size_t step_index = 0;
    double soc = 0.0;
    double v_achieved = 0.0;       // m/s
    double prev_engine_kw = 0.0;   // last step's ICE output, for ramping
    double prev_motor_kw = 0.0;    // last step's motor output magnitude
    double cum_fuel_kwh = 0.0;
    double cum_batt_kwh = 0.0;     // net pack-level discharge so far (signed)
    std::size_t speed_miss_count = 0;
};

/// One step's power flows. Sign conventions: p_required/p_wheel are wheel-
/// side (+ = propulsion); p_batt is terminal power (+ = discharge); p_ice
/// and fuel are nonnegative. soc and cum_fuel_kwh are post-step values.
struct StepResult {
    double p_required_kw = 0.0;  // demanded by the cycle (signed)
    double p_wheel_kw = 0.0;     // delivered (>= 0 on drive steps, 0 when braking)
    double p_achieved_kw = 0.0;  // fuel power + positive battery terminal power
    double p_ice_kw = 0.0;
    double p_batt_kw = 0.0;
    double fuel_kw = 0.0;        // chemical fuel power
    double v_target = 0.0;
    double v_achieved = 0.0;
    double regen_kwh = 0.0;      // energy stored by regen this step
    double soc = 0.0;
    double cum_fuel_kwh = 0.0;
    bool speed_miss = false;
};

struct Trace {
    std::vector<StepResult> steps;
    double dt = 1.0;
    double soc_initial = 0.0;
    double capacity_kwh = 0.0;
    double total_energy_kwh = 0.0;  // cum_fuel + (soc_initial - soc_final) * capacity
    double final_soc = 0.0;
    double distance_m = 0.0;        // sum of achieved speed * dt
    std::size_t speed_miss_steps = 0;
};

/// Road-load power for moving from v_prev to v_target over dt (kW, signed):
///   P = [m*a + 0.5*rho*Cd*A*vbar^2 + m*g*Crr + m*g*grade] * vbar / 1000 + aux
/// with a = (v_target - v_prev)/dt and vbar = (v_prev + v_target)/2. The
/// rolling-resistance and grade terms only apply while the vehicle moves
/// (they vanish with vbar). Negative values are braking demand.
double required_power(const vehicle::VehicleParams& v, double v_prev,
                      double v_target, double grade, double dt);

/// Largest speed in [0, v_target] reachable with total wheel power p_max_kw,
/// by bisection (v_target when unconstrained). Never exceeds v_target.
double achievable_speed(const vehicle::VehicleParams& v, const SimState& state,
                        double v_target, double grade, double dt,
                        double p_max_kw);

/// Advance one timestep with power split split_u in [0,1] (ICE share of the
/// positive wheel demand). Braking steps ignore the split and run regen.
/// Infeasible demand shows up as a speed miss, never as an error.
///
/// Accounting model (drive steps):
///   - engine output p_ice = clamp(split_u * P_req, 0, ramp), snapped to 0
///     below kEngineMinKw; fuel = p_ice / eff(p_ice / max) + idle draw.
///   - series-parallel: p_ice drives the axle up to the road demand; any
///     surplus runs the generator into the bus at eta_charge. series: all of
///     p_ice enters the bus at eta_charge and traction goes through the
///     motor alone.
///   - the motor covers the remaining wheel demand; its electrical input is
///     output / eff(output / max), drawn from the bus after the auxiliary
///     load. The battery closes the bus balance at terminal power p_batt,
///     capped by max_discharge and the energy above soc_min; the pack drains
///     p_batt / eta_discharge, and bus surplus charges it (at unity, the
///     generator having already paid eta_charge).
///   - when the caps bind, the achieved speed is recomputed by bisection and
///     all flows are re-derived from it, so per-step energy bookkeeping is
///     exact.
/// Braking steps: regen terminal power = min(|P_req| * regen_efficiency,
/// motor max, battery max_charge, headroom to soc_max); the pack stores
/// regen * eta_charge.
StepResult step(SimState& state, const vehicle::VehicleParams& v,
                double v_target, double grade, double dt, double split_u);

/// Charge-blended baseline: all-electric above soc_ref while the battery
/// can cover the demand (engine tops up the excess), engine-dominant at or
/// below soc_ref. Pure function of (soc, p_req, limits).
double rule_based_split(const SimState& state, const vehicle::VehicleParams& v,
                        double p_req_kw, double soc_ref = 0.65);

/// Per-step strategy: split_u from the current state and this step's
/// required power.
using Strategy = std::function<double(const SimState&, double p_req_kw)>;

/// Fold step() over the whole cycle from soc_initial / rest.
Trace run_cycle(const vehicle::VehicleParams& v, const cycle::DriveCycle& c,
                const Strategy& strategy);

} // namespace emslab::sim
