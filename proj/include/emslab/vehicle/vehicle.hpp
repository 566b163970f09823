#pragma once
#include <string>
#include <vector>

namespace emslab::vehicle {

/// Component efficiency vs. output-power fraction. Knots span [0,1] exactly
/// and are strictly increasing in load fraction; efficiencies lie in (0,1].
struct EfficiencyCurve {
    std::vector<double> load_fraction;
    std::vector<double> efficiency;
};

struct EngineParams {
    double max_power_kw = 0.0;
    double time_to_full_power_s = 0.0;
    double idle_fuel_kw = 0.0;  // extra fuel draw while the engine is on; default 0
    EfficiencyCurve eff_curve;
};

struct MotorParams {
    double max_power_kw = 0.0;
    double time_to_full_power_s = 0.0;
    double base_mass_kg = 0.0;
    double specific_power_kg_per_kw = 0.0;
    EfficiencyCurve eff_curve;
};

struct BatteryParams {
    double capacity_kwh = 0.0;
    double max_discharge_kw = 0.0;
    double max_charge_kw = 0.0;
    double eta_discharge = 1.0;
    double eta_charge = 1.0;
    double soc_min = 0.0;
    double soc_max = 1.0;
    double soc_initial = 0.5;
};

enum class Architecture {
    series,          // ICE charges the bus through a generator, never the axle
    series_parallel  // ICE can drive the axle directly
};

struct VehicleParams {
    std::string name;
    double mass_kg = 0.0;  // includes the estimated motor mass after load
    double drag_coeff = 0.0;
    double frontal_area_m2 = 0.0;
    double rolling_resist = 0.0;
    double regen_efficiency = 0.7;
    double aux_load_kw = 0.0;
    Architecture architecture = Architecture::series_parallel;
    EngineParams engine;
    MotorParams motor;
    BatteryParams battery;
    // set once by load_vehicle; guards against double-adding the motor mass
    bool motor_mass_included = false;
};

/// Validate an efficiency curve's invariants. Throws Error(validation).
void validate_curve(const EfficiencyCurve& c, const std::string& what);

/// Full parameter validation (curve invariants, positive masses, SOC window
/// ordering, ...). Throws Error(validation).
void validate_vehicle(const VehicleParams& v);

/// Load a vehicle config (JSON, schema documented in the README), validate
/// it, and fold the estimated motor mass (base + specific_power * max_power)
/// into mass_kg exactly once.
VehicleParams load_vehicle(const std::string& path);

/// Piecewise-linear interpolation of the curve; exact at knots.
/// Throws Error(argument) if load_fraction is outside [0,1].
double eff_lookup(const EfficiencyCurve& curve, double load_fraction);

/// Power available this step given last step's output and the component's
/// ramp rate: min(max_power, prev + max_power * dt / time_to_full_power).
/// time_to_full_power = 0 means no ramp limit.
double ramp_limit(double prev_power_kw, double max_power_kw,
                  double time_to_full_power_s, double dt);

} // namespace emslab::vehicle
