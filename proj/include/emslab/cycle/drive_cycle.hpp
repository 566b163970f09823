#pragma once
#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace emslab::cycle {

/// A drive cycle: target speed (m/s) and road grade (rise/run) sampled on a
/// uniform time grid. Immutable by convention once built through one of the
/// validated paths (load_cycle, resample, generate_cycle); tests may fill
/// the fields directly to build "raw" cycles that skip the start-at-rest rule.
struct DriveCycle {
    std::string name;
    double dt = 1.0;
    std::vector<double> speed;
    std::vector<double> grade;

    std::size_t size() const { return speed.size(); }
    /// Time span (n-1)*dt.
    double duration_s() const {
        return speed.empty() ? 0.0 : static_cast<double>(speed.size() - 1) * dt;
    }
    /// Commanded acceleration into sample i: (v[i] - v[i-1]) / dt.
    double accel(std::size_t i) const { return (speed[i] - speed[i - 1]) / dt; }
};

struct CycleStats {
    double duration_s = 0.0;
    double distance_m = 0.0;   // sum of speed[i] * dt over all samples
    double mean_speed = 0.0;   // distance_m / (n * dt)
    double max_speed = 0.0;
    double max_accel = 0.0;
    double idle_fraction = 0.0;  // fraction of samples with speed < 0.1 m/s
};

enum class GenMode { noise, concat, crop };

struct GeneratorSpec {
    std::vector<std::string> sources;
    GenMode mode = GenMode::noise;
    double noise_sigma = 0.0;     // m/s
    double crop_start_s = 0.0;
    double crop_end_s = 0.0;
    std::uint64_t seed = 0;
};

/// Validate the DriveCycle invariants (nonnegative speeds, start at rest,
/// |grade| < 0.3, matching lengths, dt > 0). Throws Error(validation).
void validate_cycle(const DriveCycle& c);

/// Load a cycle from CSV (header `time_s,speed_mps,grade`; grade optional).
/// With raw=false the time grid must already be uniform and the cycle must
/// satisfy all invariants. raw=true tolerates a non-uniform grid (dt is then
/// the first interval) and skips the speed[0]=0 check so the result can be
/// fed to resample().
DriveCycle load_cycle(const std::string& path, bool raw = false);

/// Write canonical CSV (always includes the grade column). Loading a file
/// saved by this function and saving it again is byte-identical.
void save_cycle(const DriveCycle& c, const std::string& path);

/// Linear interpolation onto a uniform grid with step dt_new; endpoints are
/// preserved. Throws Error(argument) for dt_new <= 0.
DriveCycle resample(const DriveCycle& c, double dt_new);

CycleStats cycle_stats(const DriveCycle& c);

using CycleLibrary = std::map<std::string, DriveCycle>;

/// Build a cycle from existing ones. Modes:
///  - noise:  zero-mean Gaussian (noise_sigma, seeded) added to the first
///            source's speeds, clamped at 0, speed[0] reset to 0.
///  - concat: sources joined end-to-end with a 10 s zero-speed bridge
///            between consecutive sources (all must share dt).
///  - crop:   [crop_start_s, crop_end_s] window of the first source; a
///            single 0-speed sample is prepended when the window starts at
///            nonzero speed.
/// Deterministic for a fixed seed.
DriveCycle generate_cycle(const GeneratorSpec& spec, const CycleLibrary& library);

} // namespace emslab::cycle
