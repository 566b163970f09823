#pragma once
#include <string>

#include "emslab/sim/powertrain.hpp"

namespace emslab::sim {

/// One row per step: `t,v_target,v_achieved,p_req,p_ice,p_batt,soc,fuel_kwh_cum`.
void write_trace_csv(const Trace& t, const std::string& path);

/// Totals sidecar (total_energy_kwh, final_soc, distance_m, speed_miss_steps,
/// soc_initial, capacity_kwh, steps, and optionally the policy return).
void write_trace_summary(const Trace& t, const std::string& path,
                         const std::string& strategy_name,
                         const std::string& cycle_name, double policy_return);

/// Reload an exported trace (the CSV columns plus its sidecar). Used by the
/// comparison exporter; full StepResult fields are not recoverable.
struct LoadedTrace {
    std::vector<double> t;
    std::vector<double> v_target;
    std::vector<double> v_achieved;
    std::vector<double> soc;
    std::vector<double> fuel_kwh_cum;
    double soc_initial = 0.0;
    double capacity_kwh = 0.0;
    double total_energy_kwh = 0.0;
    std::string strategy_name;
};

LoadedTrace load_trace(const std::string& csv_path,
                       const std::string& summary_path);

} // namespace emslab::sim
