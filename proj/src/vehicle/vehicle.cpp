#include "emslab/vehicle/vehicle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "emslab/errors.hpp"

namespace emslab::vehicle {

using nlohmann::json;

void validate_curve(const EfficiencyCurve& c, const std::string& what) {
    if (c.load_fraction.size() != c.efficiency.size() ||
        c.load_fraction.size() < 2)
        fail(ErrorCategory::validation,
             what + ": curve needs matching arrays with >= 2 knots");
    if (c.load_fraction.front() != 0.0 || c.load_fraction.back() != 1.0)
        fail(ErrorCategory::validation,
             what + ": curve must span load fractions 0 to 1");
    for (std::size_t i = 0; i < c.load_fraction.size(); ++i) {
        if (i > 0 && !(c.load_fraction[i] > c.load_fraction[i - 1]))
            fail(ErrorCategory::validation,
                 what + ": load fractions must be strictly increasing");
        if (!(c.efficiency[i] > 0.0) || !(c.efficiency[i] <= 1.0))
            fail(ErrorCategory::validation,
                 what + ": efficiencies must be in (0,1]");
    }
}

void validate_vehicle(const VehicleParams& v) {
    if (!(v.mass_kg > 0.0)) fail(ErrorCategory::validation, "mass_kg must be > 0");
    if (!(v.drag_coeff > 0.0))
        fail(ErrorCategory::validation, "drag_coeff must be > 0");
    if (!(v.frontal_area_m2 > 0.0))
        fail(ErrorCategory::validation, "frontal_area_m2 must be > 0");
    if (!(v.rolling_resist >= 0.0))
        fail(ErrorCategory::validation, "rolling_resist must be >= 0");
    if (!(v.regen_efficiency > 0.0) || !(v.regen_efficiency <= 1.0))
        fail(ErrorCategory::validation, "regen_efficiency must be in (0,1]");
    if (!(v.aux_load_kw >= 0.0))
        fail(ErrorCategory::validation, "aux_load_kw must be >= 0");

    if (!(v.engine.max_power_kw > 0.0))
        fail(ErrorCategory::validation, "engine.max_power_kw must be > 0");
    if (!(v.engine.time_to_full_power_s >= 0.0))
        fail(ErrorCategory::validation, "engine.time_to_full_power_s must be >= 0");
    if (!(v.engine.idle_fuel_kw >= 0.0))
        fail(ErrorCategory::validation, "engine.idle_fuel_kw must be >= 0");
    validate_curve(v.engine.eff_curve, "engine.eff_curve");

    if (!(v.motor.max_power_kw > 0.0))
        fail(ErrorCategory::validation, "motor.max_power_kw must be > 0");
    if (!(v.motor.time_to_full_power_s >= 0.0))
        fail(ErrorCategory::validation, "motor.time_to_full_power_s must be >= 0");
    if (!(v.motor.base_mass_kg >= 0.0) ||
        !(v.motor.specific_power_kg_per_kw >= 0.0))
        fail(ErrorCategory::validation, "motor masses must be >= 0");
    validate_curve(v.motor.eff_curve, "motor.eff_curve");

    const auto& b = v.battery;
    if (!(b.capacity_kwh > 0.0))
        fail(ErrorCategory::validation, "battery.capacity_kwh must be > 0");
    if (!(b.max_discharge_kw >= 0.0) || !(b.max_charge_kw >= 0.0))
        fail(ErrorCategory::validation, "battery power limits must be >= 0");
    if (!(b.eta_discharge > 0.0) || !(b.eta_discharge <= 1.0) ||
        !(b.eta_charge > 0.0) || !(b.eta_charge <= 1.0))
        fail(ErrorCategory::validation, "battery efficiencies must be in (0,1]");
    if (!(b.soc_min >= 0.0) || !(b.soc_max <= 1.0) || !(b.soc_min < b.soc_max))
        fail(ErrorCategory::validation, "battery requires 0 <= soc_min < soc_max <= 1");
    if (!(b.soc_initial >= b.soc_min) || !(b.soc_initial <= b.soc_max))
        fail(ErrorCategory::validation,
             "battery.soc_initial must be within [soc_min, soc_max]");
}

namespace {

// json::at with a schema error naming the missing field.
const json& field(const json& j, const char* key, const std::string& ctx) {
    auto it = j.find(key);
    if (it == j.end())
        fail(ErrorCategory::parse, "missing field: " + ctx + "." + key);
    return *it;
}

double num(const json& j, const char* key, const std::string& ctx) {
    const json& f = field(j, key, ctx);
    if (!f.is_number())
        fail(ErrorCategory::parse, "field is not a number: " + ctx + "." + key);
    return f.get<double>();
}

double num_or(const json& j, const char* key, double fallback) {
    auto it = j.find(key);
    return it == j.end() ? fallback : it->get<double>();
}

EfficiencyCurve curve(const json& j, const std::string& ctx) {
    const json& c = field(j, "eff_curve", ctx);
    EfficiencyCurve out;
    out.load_fraction =
        field(c, "load_fraction", ctx + ".eff_curve").get<std::vector<double>>();
    out.efficiency =
        field(c, "efficiency", ctx + ".eff_curve").get<std::vector<double>>();
    return out;
}

} // namespace

VehicleParams load_vehicle(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCategory::io, "cannot open vehicle config: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        fail(ErrorCategory::parse, path + ": " + e.what());
    }

    VehicleParams v;
    v.name = field(j, "name", "root").get<std::string>();
    const std::string arch = field(j, "architecture", "root").get<std::string>();
    if (arch == "series") {
        v.architecture = Architecture::series;
    } else if (arch == "series-parallel") {
        v.architecture = Architecture::series_parallel;
    } else {
        fail(ErrorCategory::parse,
             path + ": architecture must be 'series' or 'series-parallel'");
    }

    const json& veh = field(j, "vehicle", "root");
    v.mass_kg = num(veh, "mass_kg", "vehicle");
    v.drag_coeff = num(veh, "drag_coeff", "vehicle");
    v.frontal_area_m2 = num(veh, "frontal_area_m2", "vehicle");
    v.rolling_resist = num(veh, "rolling_resist", "vehicle");
    v.regen_efficiency = num(veh, "regen_efficiency", "vehicle");
    v.aux_load_kw = num(veh, "aux_load_kw", "vehicle");

    const json& eng = field(j, "engine", "root");
    v.engine.max_power_kw = num(eng, "max_power_kw", "engine");
    v.engine.time_to_full_power_s = num(eng, "time_to_full_power_s", "engine");
    v.engine.idle_fuel_kw = num_or(eng, "idle_fuel_kw", 0.0);
    v.engine.eff_curve = curve(eng, "engine");

    const json& mot = field(j, "motor", "root");
    v.motor.max_power_kw = num(mot, "max_power_kw", "motor");
    v.motor.time_to_full_power_s = num(mot, "time_to_full_power_s", "motor");
    v.motor.base_mass_kg = num(mot, "base_mass_kg", "motor");
    v.motor.specific_power_kg_per_kw = num(mot, "specific_power_kg_per_kw", "motor");
    v.motor.eff_curve = curve(mot, "motor");

    const json& bat = field(j, "battery", "root");
    v.battery.capacity_kwh = num(bat, "capacity_kwh", "battery");
    v.battery.max_discharge_kw = num(bat, "max_discharge_kw", "battery");
    v.battery.max_charge_kw = num(bat, "max_charge_kw", "battery");
    v.battery.eta_discharge = num(bat, "eta_discharge", "battery");
    v.battery.eta_charge = num(bat, "eta_charge", "battery");
    v.battery.soc_min = num(bat, "soc_min", "battery");
    v.battery.soc_max = num(bat, "soc_max", "battery");
    v.battery.soc_initial = num(bat, "soc_initial", "battery");

    validate_vehicle(v);

    // fold the scaled motor mass into the vehicle mass, exactly once
    v.mass_kg += v.motor.base_mass_kg +
                 v.motor.specific_power_kg_per_kw * v.motor.max_power_kw;
    v.motor_mass_included = true;
    return v;
}

double eff_lookup(const EfficiencyCurve& curve, double load_fraction) {
    if (!(load_fraction >= 0.0) || !(load_fraction <= 1.0))
        fail(ErrorCategory::argument,
             "load_fraction outside [0,1]: " + std::to_string(load_fraction));
    const auto& lf = curve.load_fraction;
    auto hi = std::upper_bound(lf.begin(), lf.end(), load_fraction);
    if (hi == lf.begin()) return curve.efficiency.front();
    if (hi == lf.end()) return curve.efficiency.back();
    const auto i = static_cast<std::size_t>(hi - lf.begin());
    const double t = (load_fraction - lf[i - 1]) / (lf[i] - lf[i - 1]);
    return curve.efficiency[i - 1] + t * (curve.efficiency[i] - curve.efficiency[i - 1]);
}

double ramp_limit(double prev_power_kw, double max_power_kw,
                  double time_to_full_power_s, double dt) {
    if (time_to_full_power_s <= 0.0) return max_power_kw;
    return std::min(max_power_kw,
                    prev_power_kw + max_power_kw * dt / time_to_full_power_s);
}

} // namespace emslab::vehicle
