#include "emslab/cycle/drive_cycle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "emslab/errors.hpp"

namespace emslab::cycle {

namespace {

constexpr double kGradeBound = 0.3;
constexpr double kIdleSpeed = 0.1;       // m/s
constexpr double kGridTol = 1e-9;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

} // namespace

void validate_cycle(const DriveCycle& c) {
    if (c.dt <= 0.0) fail(ErrorCategory::validation, "cycle dt must be > 0");
    if (c.speed.size() < 2)
        fail(ErrorCategory::validation, "cycle needs at least 2 samples");
    if (c.grade.size() != c.speed.size())
        fail(ErrorCategory::validation, "speed and grade lengths differ");
    if (c.speed.front() != 0.0)
        fail(ErrorCategory::validation, "cycle must start at rest (speed[0]=0)");
    for (std::size_t i = 0; i < c.speed.size(); ++i) {
        if (!(c.speed[i] >= 0.0))
            fail(ErrorCategory::validation,
                 "negative speed at sample " + std::to_string(i));
        if (!(std::abs(c.grade[i]) < kGradeBound))
            fail(ErrorCategory::validation,
                 "grade out of range at sample " + std::to_string(i));
    }
}

DriveCycle load_cycle(const std::string& path, bool raw) {
    std::ifstream in(path);
    if (!in) fail(ErrorCategory::io, "cannot open cycle file: " + path);

    std::string line;
    if (!std::getline(in, line))
        fail(ErrorCategory::parse, path + ": empty file");
    // tolerate a UTF-8 BOM in hand-edited files
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0)
        line.erase(0, 3);
    if (line != "time_s,speed_mps,grade" && line != "time_s,speed_mps")
        fail(ErrorCategory::parse, path + ": unexpected header '" + line + "'");

    std::vector<double> times;
    DriveCycle c;
    c.name = path;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string field;
        double vals[3] = {0.0, 0.0, 0.0};
        int nfields = 0;
        while (std::getline(row, field, ',')) {
            if (nfields >= 3)
                fail(ErrorCategory::parse,
                     path + ":" + std::to_string(lineno) + ": too many fields");
            char* end = nullptr;
            vals[nfields] = std::strtod(field.c_str(), &end);
            if (end == field.c_str() || *end != '\0')
                fail(ErrorCategory::parse, path + ":" + std::to_string(lineno) +
                                               ": bad number '" + field + "'");
            ++nfields;
        }
        if (nfields < 2)
            fail(ErrorCategory::parse,
                 path + ":" + std::to_string(lineno) + ": expected 2 or 3 fields");
        times.push_back(vals[0]);
        c.speed.push_back(vals[1]);
        c.grade.push_back(nfields == 3 ? vals[2] : 0.0);
    }
    if (times.size() < 2)
        fail(ErrorCategory::validation, path + ": needs at least 2 samples");

    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1]))
            fail(ErrorCategory::validation,
                 path + ": non-monotonic time at row " + std::to_string(i + 2));
    }
    c.dt = times[1] - times[0];
    if (!raw) {
        for (std::size_t i = 1; i < times.size(); ++i) {
            const double step = times[i] - times[i - 1];
            if (std::abs(step - c.dt) > kGridTol)
                fail(ErrorCategory::validation,
                     path + ": non-uniform time grid at row " +
                         std::to_string(i + 2) + " (resample a raw load first)");
        }
        validate_cycle(c);
    } else {
        for (std::size_t i = 0; i < c.speed.size(); ++i) {
            if (!(c.speed[i] >= 0.0))
                fail(ErrorCategory::validation,
                     path + ": negative speed at sample " + std::to_string(i));
        }
    }
    return c;
}

void save_cycle(const DriveCycle& c, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(ErrorCategory::io, "cannot write cycle file: " + path);
    out << "time_s,speed_mps,grade\n";
    for (std::size_t i = 0; i < c.size(); ++i) {
        out << fmt(static_cast<double>(i) * c.dt) << ',' << fmt(c.speed[i])
            << ',' << fmt(c.grade[i]) << '\n';
    }
    if (!out) fail(ErrorCategory::io, "write failed: " + path);
}

DriveCycle resample(const DriveCycle& c, double dt_new) {
    if (!(dt_new > 0.0))
        fail(ErrorCategory::argument, "resample dt must be > 0");
    const double duration = c.duration_s();
    const auto n_new =
        static_cast<std::size_t>(std::ceil(duration / dt_new - kGridTol)) + 1;

    DriveCycle out;
    out.name = c.name;
    out.dt = dt_new;
    out.speed.resize(n_new);
    out.grade.resize(n_new);
    for (std::size_t i = 0; i < n_new; ++i) {
        const double t = std::min(static_cast<double>(i) * dt_new, duration);
        const double pos = t / c.dt;
        auto lo = static_cast<std::size_t>(pos);
        if (lo >= c.size() - 1) lo = c.size() - 2;
        const double frac = pos - static_cast<double>(lo);
        out.speed[i] = c.speed[lo] + frac * (c.speed[lo + 1] - c.speed[lo]);
        out.grade[i] = c.grade[lo] + frac * (c.grade[lo + 1] - c.grade[lo]);
    }
    // guard against interpolation round-off at the endpoints
    out.speed.front() = c.speed.front();
    out.speed.back() = c.speed.back();
    out.grade.front() = c.grade.front();
    out.grade.back() = c.grade.back();
    return out;
}

CycleStats cycle_stats(const DriveCycle& c) {
    CycleStats s;
    s.duration_s = c.duration_s();
    std::size_t idle = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        s.distance_m += c.speed[i] * c.dt;
        s.max_speed = std::max(s.max_speed, c.speed[i]);
        if (i > 0) s.max_accel = std::max(s.max_accel, c.accel(i));
        if (c.speed[i] < kIdleSpeed) ++idle;
    }
    s.mean_speed = s.distance_m / (static_cast<double>(c.size()) * c.dt);
    s.idle_fraction = static_cast<double>(idle) / static_cast<double>(c.size());
    return s;
}

DriveCycle generate_cycle(const GeneratorSpec& spec, const CycleLibrary& library) {
    if (spec.sources.empty())
        fail(ErrorCategory::validation, "generator spec has no sources");
    if (spec.noise_sigma < 0.0)
        fail(ErrorCategory::validation, "noise_sigma must be >= 0");

    std::vector<const DriveCycle*> srcs;
    srcs.reserve(spec.sources.size());
    for (const auto& name : spec.sources) {
        auto it = library.find(name);
        if (it == library.end())
            fail(ErrorCategory::argument, "unknown source cycle: " + name);
        srcs.push_back(&it->second);
    }

    DriveCycle out;
    switch (spec.mode) {
        case GenMode::noise: {
            out = *srcs.front();
            out.name = "noise(" + spec.sources.front() + ")";
            if (spec.noise_sigma > 0.0) {
                std::mt19937_64 rng(spec.seed);
                std::normal_distribution<double> gauss(0.0, spec.noise_sigma);
                for (auto& v : out.speed) v = std::max(0.0, v + gauss(rng));
            }
            out.speed.front() = 0.0;
            break;
        }
        case GenMode::concat: {
            const double dt = srcs.front()->dt;
            for (const auto* s : srcs) {
                if (std::abs(s->dt - dt) > kGridTol)
                    fail(ErrorCategory::validation,
                         "concat sources must share dt");
            }
            out.dt = dt;
            out.name = "concat";
            const auto bridge =
                static_cast<std::size_t>(std::llround(10.0 / dt)) - 1;
            for (std::size_t k = 0; k < srcs.size(); ++k) {
                if (k > 0) {
                    out.speed.insert(out.speed.end(), bridge, 0.0);
                    out.grade.insert(out.grade.end(), bridge, 0.0);
                }
                out.speed.insert(out.speed.end(), srcs[k]->speed.begin(),
                                 srcs[k]->speed.end());
                out.grade.insert(out.grade.end(), srcs[k]->grade.begin(),
                                 srcs[k]->grade.end());
            }
            break;
        }
        case GenMode::crop: {
            const DriveCycle& src = *srcs.front();
            if (!(spec.crop_start_s >= 0.0) ||
                !(spec.crop_end_s > spec.crop_start_s) ||
                spec.crop_end_s > src.duration_s() + kGridTol)
                fail(ErrorCategory::validation,
                     "crop window outside source duration");
            const auto i0 =
                static_cast<std::size_t>(std::llround(spec.crop_start_s / src.dt));
            const auto i1 =
                static_cast<std::size_t>(std::llround(spec.crop_end_s / src.dt));
            out.dt = src.dt;
            out.name = "crop(" + spec.sources.front() + ")";
            out.speed.assign(src.speed.begin() + i0, src.speed.begin() + i1 + 1);
            out.grade.assign(src.grade.begin() + i0, src.grade.begin() + i1 + 1);
            if (out.speed.front() != 0.0) {
                out.speed.insert(out.speed.begin(), 0.0);
                out.grade.insert(out.grade.begin(), out.grade.front());
            }
            break;
        }
    }
    validate_cycle(out);
    return out;
}

} // namespace emslab::cycle
