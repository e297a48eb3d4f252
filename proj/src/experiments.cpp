#include "flsim/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "flsim/errors.hpp"
#include "flsim/stats.hpp"

namespace flsim::experiments {

namespace {

constexpr double kMetersPerSecondPerKnot = 0.514444;

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_hex(std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s, const char* what) {
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw ConfigError("");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(std::string("sweep CSV: bad ") + what + " value '" + s + "'");
    }
}

long long parse_int(const std::string& s, const char* what) {
    try {
        size_t pos = 0;
        long long v = std::stoll(s, &pos);
        if (pos != s.size()) throw ConfigError("");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(std::string("sweep CSV: bad ") + what + " value '" + s + "'");
    }
}

void write_episode_log(const std::string& dir, const std::string& experiment, int value_index,
                       BeamMode mode, int episode, double value,
                       const worldsim::EpisodeLog& log) {
    std::string stem = dir + "/" + experiment + "_p" + std::to_string(value_index) + "_" +
                       beam_mode_name(mode) + "_ep" + std::to_string(episode);
    std::ofstream out(stem + ".csv");
    if (!out) throw ConfigError("cannot write episode log: " + stem + ".csv");
    out << "# world=" << fmt_hex(log.world_hash) << " value=" << fmt_double(value)
        << " mode=" << beam_mode_name(mode) << " episode=" << episode << "\n";
    out << "epoch,x,y,psi,action,p_straight,p_left,p_right,risk_straight,risk_left,risk_right,"
           "p_h1,collided\n";
    for (const worldsim::EpochRecord& r : log.records) {
        out << r.epoch << ',' << fmt_double(r.x) << ',' << fmt_double(r.y) << ','
            << fmt_double(r.psi) << ',' << r.action << ',' << fmt_double(r.collision_probs[0])
            << ',' << fmt_double(r.collision_probs[1]) << ',' << fmt_double(r.collision_probs[2])
            << ',' << fmt_double(r.risks[0]) << ',' << fmt_double(r.risks[1]) << ','
            << fmt_double(r.risks[2]) << ',' << fmt_double(r.p_h1) << ',' << (r.collided ? 1 : 0)
            << "\n";
    }
    if (log.dump_maps) {
        std::ofstream maps(stem + "_maps.csv");
        if (!maps) throw ConfigError("cannot write map dump: " + stem + "_maps.csv");
        maps << "epoch,cell,probability\n";
        for (size_t e = 0; e < log.maps.size(); ++e) {
            for (size_t c = 0; c < log.maps[e].size(); ++c) {
                maps << e << ',' << c << ',' << fmt_double(log.maps[e][c]) << "\n";
            }
        }
    }
}

}  // namespace

const char* experiment_name(Experiment e) {
    switch (e) {
        case Experiment::Density: return "density";
        case Experiment::Radius: return "radius";
        case Experiment::SurgeError: return "surge_error";
        case Experiment::YawError: return "yaw_error";
        case Experiment::Altitude: return "altitude";
        case Experiment::Single: return "single";
    }
    throw DomainError("unknown experiment");
}

Experiment experiment_from_name(const std::string& name) {
    if (name == "density") return Experiment::Density;
    if (name == "radius") return Experiment::Radius;
    if (name == "surge_error") return Experiment::SurgeError;
    if (name == "yaw_error") return Experiment::YawError;
    if (name == "altitude") return Experiment::Altitude;
    if (name == "single") return Experiment::Single;
    throw ConfigError("unknown experiment '" + name +
                      "' (expected density, radius, surge_error, yaw_error, altitude or single)");
}

std::vector<double> sweep_values(const Config& config, Experiment e) {
    switch (e) {
        case Experiment::Density: return config.experiments.density_values;
        case Experiment::Radius: return config.experiments.radius_values;
        case Experiment::SurgeError: return config.experiments.surge_error_values_kn;
        case Experiment::YawError: return config.experiments.yaw_error_values;
        case Experiment::Altitude: return config.experiments.altitude_values;
        case Experiment::Single: return {0.0};
    }
    throw DomainError("unknown experiment");
}

Config apply_sweep_value(const Config& base, Experiment e, double value) {
    Config cfg = base;
    switch (e) {
        case Experiment::Density:
            cfg.world.n_obstacles = static_cast<int>(std::lround(value));
            break;
        case Experiment::Radius:
            cfg.world.obstacle_radius_m = value;
            break;
        case Experiment::SurgeError:
            cfg.vehicle.surge_bias_mps = value * kMetersPerSecondPerKnot;
            break;
        case Experiment::YawError:
            cfg.vehicle.yaw_noise_std_rps = value;
            break;
        case Experiment::Altitude:
            cfg.environment.seafloor_depth_m = cfg.environment.sonar_depth_m + value;
            break;
        case Experiment::Single:
            break;
    }
    cfg.validate();
    return cfg;
}

SweepResult run_sweep(const Config& base, const SweepOptions& options) {
    if (options.runs <= 0) throw ConfigError("sweep runs must be positive");
    if (options.modes.empty()) throw ConfigError("sweep needs at least one beam mode");

    SweepResult result;
    result.experiment = experiment_name(options.experiment);
    result.version = kVersion;
    result.config_hash = base.hash();
    result.master_seed = options.master_seed;
    result.confidence = options.confidence;

    std::vector<double> values = sweep_values(base, options.experiment);
    int n_threads = options.threads > 0
                        ? options.threads
                        : static_cast<int>(std::thread::hardware_concurrency());
    n_threads = std::max(1, std::min(n_threads, options.runs));

    for (size_t vi = 0; vi < values.size(); ++vi) {
        double value = values[vi];
        Config cfg = apply_sweep_value(base, options.experiment, value);

        std::vector<worldsim::EpisodeContext> contexts;
        contexts.reserve(options.modes.size());
        for (BeamMode mode : options.modes)
            contexts.push_back(worldsim::EpisodeContext::build(cfg, mode));

        std::vector<std::vector<char>> collided(
            options.modes.size(), std::vector<char>(static_cast<size_t>(options.runs), 0));

        std::atomic<int> next{0};
        std::mutex error_mutex;
        std::exception_ptr first_error;

        auto worker = [&]() {
            try {
                for (;;) {
                    int ep = next.fetch_add(1);
                    if (ep >= options.runs) break;
                    worldsim::World world = worldsim::generate_world(
                        cfg.world,
                        derive_seed(options.master_seed, static_cast<std::uint64_t>(ep),
                                    StreamTag::World));
                    for (size_t m = 0; m < options.modes.size(); ++m) {
                        worldsim::EpisodeLog log;
                        worldsim::EpisodeLog* log_ptr = nullptr;
                        if (!options.episode_log_dir.empty()) {
                            log.dump_maps = options.map_dumps;
                            log_ptr = &log;
                        }
                        worldsim::EpisodeOutcome out = worldsim::run_episode(
                            contexts[m], world, options.master_seed,
                            static_cast<std::uint64_t>(ep), log_ptr);
                        collided[m][static_cast<size_t>(ep)] = out.collided ? 1 : 0;
                        if (log_ptr != nullptr) {
                            write_episode_log(options.episode_log_dir, result.experiment,
                                              static_cast<int>(vi), options.modes[m], ep, value,
                                              log);
                        }
                    }
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        };

        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(n_threads));
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
        if (first_error) std::rethrow_exception(first_error);

        for (size_t m = 0; m < options.modes.size(); ++m) {
            SweepPoint point;
            point.value = value;
            point.mode = options.modes[m];
            point.runs = options.runs;
            for (char c : collided[m]) point.collisions += c;
            stats::Interval ci =
                stats::clopper_pearson(point.collisions, point.runs, options.confidence);
            point.ci_lower = ci.lower;
            point.ci_upper = ci.upper;
            result.points.push_back(point);
        }
    }
    return result;
}

void write_csv(std::ostream& out, const SweepResult& result) {
    out << "# flsim version=" << result.version << " experiment=" << result.experiment
        << " config=" << fmt_hex(result.config_hash) << " seed=" << result.master_seed
        << " confidence=" << fmt_double(result.confidence) << "\n";
    out << "sweep_value,beam_mode,runs,collisions,ci_lower,ci_upper\n";
    for (const SweepPoint& p : result.points) {
        out << fmt_double(p.value) << ',' << beam_mode_name(p.mode) << ',' << p.runs << ','
            << p.collisions << ',' << fmt_double(p.ci_lower) << ',' << fmt_double(p.ci_upper)
            << "\n";
    }
}

void write_csv_file(const std::string& path, const SweepResult& result) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write sweep CSV: " + path);
    write_csv(out, result);
}

SweepResult read_csv(std::istream& in) {
    SweepResult result;
    std::string line;
    bool saw_comment = false;
    bool saw_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            for (const std::string& token : split(line.substr(1), ' ')) {
                size_t eq = token.find('=');
                if (eq == std::string::npos) continue;
                std::string key = token.substr(0, eq);
                std::string val = token.substr(eq + 1);
                if (key == "version") result.version = val;
                if (key == "experiment") result.experiment = val;
                if (key == "config") result.config_hash = std::stoull(val, nullptr, 16);
                if (key == "seed") result.master_seed = std::stoull(val);
                if (key == "confidence") result.confidence = parse_double(val, "confidence");
            }
            saw_comment = true;
            continue;
        }
        if (!saw_header) {
            if (line != "sweep_value,beam_mode,runs,collisions,ci_lower,ci_upper")
                throw ConfigError("sweep CSV: unexpected header '" + line + "'");
            saw_header = true;
            continue;
        }
        std::vector<std::string> fields = split(line, ',');
        if (fields.size() != 6) throw ConfigError("sweep CSV: expected 6 fields in '" + line + "'");
        SweepPoint p;
        p.value = parse_double(fields[0], "sweep_value");
        p.mode = beam_mode_from_name(fields[1]);
        p.runs = static_cast<int>(parse_int(fields[2], "runs"));
        p.collisions = static_cast<int>(parse_int(fields[3], "collisions"));
        p.ci_lower = parse_double(fields[4], "ci_lower");
        p.ci_upper = parse_double(fields[5], "ci_upper");
        result.points.push_back(p);
    }
    if (!saw_comment || !saw_header)
        throw ConfigError("sweep CSV: missing comment line or column header");
    return result;
}

SweepResult read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read sweep CSV: " + path);
    return read_csv(in);
}

std::string summarize(const SweepResult& result) {
    std::ostringstream out;
    out << result.experiment << " sweep, config " << fmt_hex(result.config_hash) << ", seed "
        << result.master_seed << ", " << result.confidence * 100.0 << "% intervals\n";
    for (const SweepPoint& p : result.points) {
        double rate = p.runs > 0 ? static_cast<double>(p.collisions) / p.runs : 0.0;
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "  value %-8g %-6s %4d/%d collided  rate %6.2f%%  CI [%5.2f%%, %6.2f%%]\n",
                      p.value, beam_mode_name(p.mode), p.collisions, p.runs, rate * 100.0,
                      p.ci_lower * 100.0, p.ci_upper * 100.0);
        out << buf;
    }
    return out.str();
}

}  // namespace flsim::experiments
