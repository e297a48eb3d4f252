#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "flsim/config.hpp"
#include "flsim/worldsim.hpp"

namespace flsim::experiments {

enum class Experiment { Density, Radius, SurgeError, YawError, Altitude, Single };

const char* experiment_name(Experiment e);
Experiment experiment_from_name(const std::string& name);

// Sweep values for the experiment, from the config's experiment tables.
std::vector<double> sweep_values(const Config& config, Experiment e);

// A copy of `base` with one sweep value applied: obstacle count, obstacle
// radius, surge bias (value in knots), yaw-rate noise std, or altitude above
// the seafloor (value sets seafloor depth below the sonar). Single leaves
// the config untouched.
Config apply_sweep_value(const Config& base, Experiment e, double value);

struct SweepPoint {
    double value = 0.0;
    BeamMode mode = BeamMode::Three;
    int runs = 0;
    int collisions = 0;
    double ci_lower = 0.0;
    double ci_upper = 1.0;
};

struct SweepResult {
    std::string experiment;
    std::string version;
    std::uint64_t config_hash = 0;
    std::uint64_t master_seed = 0;
    double confidence = 0.95;
    std::vector<SweepPoint> points;
};

struct SweepOptions {
    Experiment experiment = Experiment::Density;
    std::vector<BeamMode> modes = {BeamMode::Single, BeamMode::Three};
    int runs = 200;
    std::uint64_t master_seed = 12345;
    int threads = 0;  // <= 0 picks hardware concurrency
    double confidence = 0.95;
    std::string episode_log_dir;  // when set, per-episode CSV logs are written here
    bool map_dumps = false;       // with logs: also dump the per-epoch map state
};

// Runs the sweep: values in order; per value, `runs` paired episodes spread
// over a thread pool. Episode i of every mode shares one world generated
// from derive_seed(master, i, World) and the same dynamics-noise stream, so
// the modes are compared under common random numbers. Aggregation is a sum
// of per-episode flags, independent of completion order. Collision counts
// get Clopper-Pearson intervals at the configured confidence.
SweepResult run_sweep(const Config& base, const SweepOptions& options);

// CSV with one `#` comment line (version, config hash, experiment, seed)
// then `sweep_value,beam_mode,runs,collisions,ci_lower,ci_upper` rows.
// Values are printed with enough digits that read_csv(write_csv(x)) == x.
void write_csv(std::ostream& out, const SweepResult& result);
void write_csv_file(const std::string& path, const SweepResult& result);
SweepResult read_csv(std::istream& in);
SweepResult read_csv_file(const std::string& path);

// Human-readable per-point collision rates and intervals.
std::string summarize(const SweepResult& result);

}  // namespace flsim::experiments
