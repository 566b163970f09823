#include "emslab/sim/trace_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "emslab/errors.hpp"

namespace emslab::sim {

using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

} // namespace

void write_trace_csv(const Trace& t, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(ErrorCategory::io, "cannot write trace: " + path);
    out << "t,v_target,v_achieved,p_req,p_ice,p_batt,soc,fuel_kwh_cum\n";
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
        const auto& s = t.steps[i];
        out << fmt(static_cast<double>(i + 1) * t.dt) << ',' << fmt(s.v_target)
            << ',' << fmt(s.v_achieved) << ',' << fmt(s.p_required_kw) << ','
            << fmt(s.p_ice_kw) << ',' << fmt(s.p_batt_kw) << ',' << fmt(s.soc)
            << ',' << fmt(s.cum_fuel_kwh) << '\n';
    }
    if (!out) fail(ErrorCategory::io, "write failed: " + path);
}

void write_trace_summary(const Trace& t, const std::string& path,
                         const std::string& strategy_name,
                         const std::string& cycle_name, double policy_return) {
    json j;
    j["strategy"] = strategy_name;
    j["cycle"] = cycle_name;
    j["steps"] = t.steps.size();
    j["total_energy_kwh"] = t.total_energy_kwh;
    j["final_soc"] = t.final_soc;
    j["soc_initial"] = t.soc_initial;
    j["capacity_kwh"] = t.capacity_kwh;
    j["distance_m"] = t.distance_m;
    j["speed_miss_steps"] = t.speed_miss_steps;
    j["return"] = policy_return;
    std::ofstream out(path);
    if (!out) fail(ErrorCategory::io, "cannot write summary: " + path);
    out << j.dump(2) << '\n';
}

LoadedTrace load_trace(const std::string& csv_path,
                       const std::string& summary_path) {
    LoadedTrace lt;

    std::ifstream in(csv_path);
    if (!in) fail(ErrorCategory::io, "cannot open trace: " + csv_path);
    std::string line;
    if (!std::getline(in, line) ||
        line != "t,v_target,v_achieved,p_req,p_ice,p_batt,soc,fuel_kwh_cum")
        fail(ErrorCategory::parse, csv_path + ": unexpected trace header");
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string f;
        double vals[8];
        for (int k = 0; k < 8; ++k) {
            if (!std::getline(row, f, ','))
                fail(ErrorCategory::parse,
                     csv_path + ":" + std::to_string(lineno) + ": short row");
            vals[k] = std::strtod(f.c_str(), nullptr);
        }
        lt.t.push_back(vals[0]);
        lt.v_target.push_back(vals[1]);
        lt.v_achieved.push_back(vals[2]);
        lt.soc.push_back(vals[6]);
        lt.fuel_kwh_cum.push_back(vals[7]);
    }

    std::ifstream sin(summary_path);
    if (!sin) fail(ErrorCategory::io, "cannot open summary: " + summary_path);
    json j;
    try {
        sin >> j;
    } catch (const json::exception& e) {
        fail(ErrorCategory::parse, summary_path + ": " + e.what());
    }
    lt.soc_initial = j.at("soc_initial").get<double>();
    lt.capacity_kwh = j.at("capacity_kwh").get<double>();
    lt.total_energy_kwh = j.at("total_energy_kwh").get<double>();
    lt.strategy_name = j.at("strategy").get<std::string>();
    return lt;
}

} // namespace emslab::sim
