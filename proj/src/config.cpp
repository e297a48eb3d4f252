#include "flsim/config.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

#include "flsim/errors.hpp"

namespace flsim {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt(const std::vector<double>& values) {
    std::string out = "[";
    for (size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        out += fmt(values[i]);
    }
    out += "]";
    return out;
}

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) throw ConfigError(std::string(name) + " must be finite");
}

// Pulls typed values out of a parsed table, remembering which keys were
// consumed so leftovers (typos) can be rejected.
class Reader {
  public:
    explicit Reader(const toml::Table& table) : table_(table) {}

    void get(const std::string& key, double& out) {
        if (const toml::Value* v = find(key)) out = convert(key, [&] { return v->as_float(); });
    }

    void get(const std::string& key, int& out) {
        if (const toml::Value* v = find(key)) {
            std::int64_t raw = convert(key, [&] { return v->as_int(); });
            if (raw < std::numeric_limits<int>::min() || raw > std::numeric_limits<int>::max())
                throw ConfigError("config key " + key + ": integer out of range");
            out = static_cast<int>(raw);
        }
    }

    void get(const std::string& key, std::uint64_t& out) {
        if (const toml::Value* v = find(key)) {
            std::int64_t raw = convert(key, [&] { return v->as_int(); });
            if (raw < 0) throw ConfigError("config key " + key + ": must be non-negative");
            out = static_cast<std::uint64_t>(raw);
        }
    }

    void get(const std::string& key, bool& out) {
        if (const toml::Value* v = find(key)) out = convert(key, [&] { return v->as_bool(); });
    }

    void get(const std::string& key, std::vector<double>& out) {
        if (const toml::Value* v = find(key)) {
            std::vector<double> items;
            for (const toml::Value& item : convert(key, [&] { return v->as_array(); }))
                items.push_back(convert(key, [&] { return item.as_float(); }));
            out = std::move(items);
        }
    }

    void check_unknown() const {
        for (const auto& [key, value] : table_) {
            if (!seen_.count(key)) throw ConfigError("unknown config key: " + key);
        }
    }

  private:
    const toml::Value* find(const std::string& key) {
        auto it = table_.find(key);
        if (it == table_.end()) return nullptr;
        seen_.insert(key);
        return &it->second;
    }

    template <typename F>
    auto convert(const std::string& key, F&& f) -> decltype(f()) {
        try {
            return f();
        } catch (const ConfigError& e) {
            throw ConfigError("config key " + key + ": " + e.what());
        }
    }

    const toml::Table& table_;
    std::set<std::string> seen_;
};

}  // namespace

const char* beam_mode_name(BeamMode mode) {
    return mode == BeamMode::Single ? "single" : "three";
}

BeamMode beam_mode_from_name(const std::string& name) {
    if (name == "single") return BeamMode::Single;
    if (name == "three") return BeamMode::Three;
    throw ConfigError("unknown beam mode '" + name + "' (expected single or three)");
}

void BeamGeometryParams::validate() const {
    if (!(forward_width_deg > 0.0)) throw ConfigError("forward_width_deg must be positive");
    if (!(side_width_deg > 0.0)) throw ConfigError("side_width_deg must be positive");
    if (!(side_center_deg > 0.0)) throw ConfigError("side_center_deg must be positive");
    if (forward_elements < 1) throw ConfigError("forward_elements must be >= 1");
    if (side_elements < 1) throw ConfigError("side_elements must be >= 1");
    if (!(forward_spacing_wl > 0.0)) throw ConfigError("forward_spacing_wl must be positive");
    if (!(side_spacing_wl > 0.0)) throw ConfigError("side_spacing_wl must be positive");
    // Sectors must not overlap: the side beam's inner cutoff may not cross
    // into the forward sector.
    if (side_center_deg - side_width_deg / 2.0 < forward_width_deg / 2.0 - 1e-9)
        throw ConfigError("side beam sector overlaps the forward sector");
}

void ScatterParams::validate() const {
    require_finite(lambert_mu_db, "lambert_mu_db");
    require_finite(volume_scattering_db, "volume_scattering_db");
}

void SourceLevelParams::validate() const {
    if (!(margin_db >= 0.0)) throw ConfigError("source margin_db must be non-negative");
    require_finite(calibration_ts_db, "calibration_ts_db");
}

void OccupancyParams::validate() const {
    if (!(prior_occupied >= 0.0 && prior_occupied <= 1.0))
        throw ConfigError("prior_occupied outside [0, 1]");
    if (!(sensor_noise_std_db > 0.0)) throw ConfigError("sensor_noise_std_db must be positive");
    require_finite(nominal_target_strength_db, "nominal_target_strength_db");
    if (gauss_hermite_nodes < 1 || gauss_hermite_nodes % 2 == 0)
        throw ConfigError("gauss_hermite_nodes must be odd and >= 1");
    if (overlap_quadrature_n < 8) throw ConfigError("overlap_quadrature_n must be >= 8");
}

void DecisionParams::validate() const {
    if (action_costs.size() != 3)
        throw ConfigError("action_costs needs one entry per action (straight, left, right)");
    for (double c : action_costs) {
        require_finite(c, "action_costs");
        if (c < 0.0) throw ConfigError("action_costs must be non-negative");
    }
    if (!(collision_cost > 0.0)) throw ConfigError("collision_cost must be positive");
    for (double c : action_costs) {
        if (!(collision_cost > c))
            throw ConfigError("collision_cost must exceed every action cost");
    }
    if (!(cost_intervene_empty > cost_pass_empty))
        throw ConfigError("cost_intervene_empty must exceed cost_pass_empty");
    if (!(cost_pass_occupied > cost_intervene_occupied))
        throw ConfigError("cost_pass_occupied must exceed cost_intervene_occupied");
    if (intervention_blind_cost < 0.0)
        throw ConfigError("intervention_blind_cost must be non-negative");
    if (!(cost_pass_occupied > cost_intervene_occupied + intervention_blind_cost))
        throw ConfigError("intervention_blind_cost leaves no incentive to intervene");
    if (!(threat_horizon_s > 0.0)) throw ConfigError("threat_horizon_s must be positive");
    if (!(plan_horizon_s >= threat_horizon_s))
        throw ConfigError("plan_horizon_s must be at least threat_horizon_s");
    if (n_trajectory_samples < 1) throw ConfigError("n_trajectory_samples must be >= 1");
    if (trajectory_yaw_rate_std < 0.0 || trajectory_speed_std < 0.0)
        throw ConfigError("trajectory dispersion must be non-negative");
}

void VehicleParams::validate() const {
    if (!(surge_mps > 0.0)) throw ConfigError("surge_mps must be positive");
    if (!(max_yaw_rate_rps > 0.0)) throw ConfigError("max_yaw_rate_rps must be positive");
    if (!(max_yaw_accel_rps2 > 0.0)) throw ConfigError("max_yaw_accel_rps2 must be positive");
    if (!(radius_m > 0.0)) throw ConfigError("vehicle radius_m must be positive");
    if (!(control_dt_s > 0.0)) throw ConfigError("control_dt_s must be positive");
    if (!(heading_hold_gain_per_s >= 0.0))
        throw ConfigError("heading_hold_gain_per_s must be non-negative");
    require_finite(heading_hold_gain_per_s, "heading_hold_gain_per_s");
    if (surge_noise_std_mps < 0.0 || yaw_noise_std_rps < 0.0)
        throw ConfigError("actuation noise std must be non-negative");
    require_finite(surge_bias_mps, "surge_bias_mps");
    require_finite(yaw_bias_rps, "yaw_bias_rps");
    if (belief_surge_std_mps < 0.0 || belief_yaw_std_rps < 0.0)
        throw ConfigError("belief std must be non-negative");
}

void WorldParams::validate() const {
    if (!(extent_x_m > 0.0) || !(extent_y_m > 0.0)) throw ConfigError("world extent must be positive");
    if (start_x_m < 0.0 || start_x_m > extent_x_m || start_y_m < 0.0 || start_y_m > extent_y_m)
        throw ConfigError("start position outside the world");
    if (!(obstacle_x_min_m < obstacle_x_max_m))
        throw ConfigError("obstacle_x_min_m must be below obstacle_x_max_m");
    if (obstacle_x_min_m < 0.0 || obstacle_x_max_m > extent_x_m)
        throw ConfigError("obstacle zone outside the world");
    if (n_obstacles < 0) throw ConfigError("n_obstacles must be non-negative");
    if (!(obstacle_radius_m > 0.0)) throw ConfigError("obstacle_radius_m must be positive");
    if (!(ts_min_db <= ts_max_db)) throw ConfigError("ts_min_db must not exceed ts_max_db");
    if (max_place_attempts < 1) throw ConfigError("max_place_attempts must be >= 1");
    if (max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
}

void ExperimentParams::validate() const {
    if (runs < 1) throw ConfigError("runs must be >= 1");
    if (threads < 0) throw ConfigError("threads must be non-negative");
    if (!(confidence > 0.0 && confidence < 1.0)) throw ConfigError("confidence outside (0, 1)");
    if (density_values.empty() || radius_values.empty() || surge_error_values_kn.empty() ||
        yaw_error_values.empty() || altitude_values.empty())
        throw ConfigError("sweep value lists must be non-empty");
    for (double d : density_values) {
        if (d < 0.0 || std::abs(d - std::lround(d)) > 1e-9)
            throw ConfigError("density_values must be non-negative integers");
    }
    for (double r : radius_values) {
        if (!(r > 0.0)) throw ConfigError("radius_values must be positive");
    }
    for (double y : yaw_error_values) {
        if (y < 0.0) throw ConfigError("yaw_error_values must be non-negative");
    }
    for (double a : altitude_values) {
        if (!(a > 0.0)) throw ConfigError("altitude_values must be positive");
    }
}

void Config::validate() const {
    environment.validate();
    sonar.validate();
    beams.validate();
    scatter.validate();
    source.validate();
    occupancy.validate();
    decision.validate();
    vehicle.validate();
    world.validate();
    experiments.validate();
    if (sonar.max_range_m > std::min(world.extent_x_m, world.extent_y_m))
        throw ConfigError("sonar max_range_m exceeds the world extent");
    for (double a : experiments.altitude_values) {
        // The altitude sweep rewrites seafloor_depth_m = sonar_depth_m + a.
        if (!(environment.sonar_depth_m + a > environment.sonar_depth_m))
            throw ConfigError("altitude sweep value must be positive");
    }
}

Config Config::from_toml(const toml::Table& table) {
    Config c;
    Reader r(table);

    r.get("environment.temperature_c", c.environment.temperature_c);
    r.get("environment.salinity_ppt", c.environment.salinity_ppt);
    r.get("environment.sonar_depth_m", c.environment.sonar_depth_m);
    r.get("environment.seafloor_depth_m", c.environment.seafloor_depth_m);
    r.get("environment.sea_state", c.environment.sea_state);
    r.get("environment.shipping_level", c.environment.shipping_level);
    r.get("environment.ph", c.environment.ph);

    r.get("sonar.frequency_khz", c.sonar.frequency_khz);
    r.get("sonar.source_level_db", c.sonar.source_level_db);
    r.get("sonar.pulse_length_s", c.sonar.pulse_length_s);
    r.get("sonar.range_resolution_m", c.sonar.range_resolution_m);
    r.get("sonar.max_range_m", c.sonar.max_range_m);
    r.get("sonar.ping_interval_s", c.sonar.ping_interval_s);

    r.get("beams.forward_width_deg", c.beams.forward_width_deg);
    r.get("beams.side_width_deg", c.beams.side_width_deg);
    r.get("beams.side_center_deg", c.beams.side_center_deg);
    r.get("beams.forward_elements", c.beams.forward_elements);
    r.get("beams.forward_spacing_wl", c.beams.forward_spacing_wl);
    r.get("beams.side_elements", c.beams.side_elements);
    r.get("beams.side_spacing_wl", c.beams.side_spacing_wl);

    r.get("scatter.lambert_mu_db", c.scatter.lambert_mu_db);
    r.get("scatter.volume_scattering_db", c.scatter.volume_scattering_db);

    r.get("source.auto_source_level", c.source.auto_source_level);
    r.get("source.margin_db", c.source.margin_db);
    r.get("source.calibration_ts_db", c.source.calibration_ts_db);

    r.get("occupancy.prior_occupied", c.occupancy.prior_occupied);
    r.get("occupancy.sensor_noise_std_db", c.occupancy.sensor_noise_std_db);
    r.get("occupancy.nominal_target_strength_db", c.occupancy.nominal_target_strength_db);
    r.get("occupancy.gauss_hermite_nodes", c.occupancy.gauss_hermite_nodes);
    r.get("occupancy.overlap_quadrature_n", c.occupancy.overlap_quadrature_n);

    r.get("decision.action_costs", c.decision.action_costs);
    r.get("decision.collision_cost", c.decision.collision_cost);
    r.get("decision.cost_pass_empty", c.decision.cost_pass_empty);
    r.get("decision.cost_intervene_empty", c.decision.cost_intervene_empty);
    r.get("decision.cost_pass_occupied", c.decision.cost_pass_occupied);
    r.get("decision.cost_intervene_occupied", c.decision.cost_intervene_occupied);
    r.get("decision.intervention_blind_cost", c.decision.intervention_blind_cost);
    r.get("decision.threat_horizon_s", c.decision.threat_horizon_s);
    r.get("decision.plan_horizon_s", c.decision.plan_horizon_s);
    r.get("decision.n_trajectory_samples", c.decision.n_trajectory_samples);
    r.get("decision.trajectory_yaw_rate_std", c.decision.trajectory_yaw_rate_std);
    r.get("decision.trajectory_speed_std", c.decision.trajectory_speed_std);

    r.get("vehicle.surge_mps", c.vehicle.surge_mps);
    r.get("vehicle.max_yaw_rate_rps", c.vehicle.max_yaw_rate_rps);
    r.get("vehicle.max_yaw_accel_rps2", c.vehicle.max_yaw_accel_rps2);
    r.get("vehicle.radius_m", c.vehicle.radius_m);
    r.get("vehicle.control_dt_s", c.vehicle.control_dt_s);
    r.get("vehicle.heading_hold_gain_per_s", c.vehicle.heading_hold_gain_per_s);
    r.get("vehicle.surge_bias_mps", c.vehicle.surge_bias_mps);
    r.get("vehicle.surge_noise_std_mps", c.vehicle.surge_noise_std_mps);
    r.get("vehicle.yaw_bias_rps", c.vehicle.yaw_bias_rps);
    r.get("vehicle.yaw_noise_std_rps", c.vehicle.yaw_noise_std_rps);
    r.get("vehicle.belief_surge_std_mps", c.vehicle.belief_surge_std_mps);
    r.get("vehicle.belief_yaw_std_rps", c.vehicle.belief_yaw_std_rps);

    r.get("world.extent_x_m", c.world.extent_x_m);
    r.get("world.extent_y_m", c.world.extent_y_m);
    r.get("world.start_x_m", c.world.start_x_m);
    r.get("world.start_y_m", c.world.start_y_m);
    r.get("world.start_heading_rad", c.world.start_heading_rad);
    r.get("world.obstacle_x_min_m", c.world.obstacle_x_min_m);
    r.get("world.obstacle_x_max_m", c.world.obstacle_x_max_m);
    r.get("world.n_obstacles", c.world.n_obstacles);
    r.get("world.obstacle_radius_m", c.world.obstacle_radius_m);
    r.get("world.ts_min_db", c.world.ts_min_db);
    r.get("world.ts_max_db", c.world.ts_max_db);
    r.get("world.max_place_attempts", c.world.max_place_attempts);
    r.get("world.max_epochs", c.world.max_epochs);

    r.get("experiments.runs", c.experiments.runs);
    r.get("experiments.master_seed", c.experiments.master_seed);
    r.get("experiments.threads", c.experiments.threads);
    r.get("experiments.confidence", c.experiments.confidence);
    r.get("experiments.density_values", c.experiments.density_values);
    r.get("experiments.radius_values", c.experiments.radius_values);
    r.get("experiments.surge_error_values_kn", c.experiments.surge_error_values_kn);
    r.get("experiments.yaw_error_values", c.experiments.yaw_error_values);
    r.get("experiments.altitude_values", c.experiments.altitude_values);

    r.check_unknown();
    c.validate();
    return c;
}

Config Config::from_file(const std::string& path) {
    return from_toml(toml::parse_file(path));
}

std::string Config::to_toml() const {
    std::ostringstream out;
    out << "[environment]\n";
    out << "temperature_c = " << fmt(environment.temperature_c) << "\n";
    out << "salinity_ppt = " << fmt(environment.salinity_ppt) << "\n";
    out << "sonar_depth_m = " << fmt(environment.sonar_depth_m) << "\n";
    out << "seafloor_depth_m = " << fmt(environment.seafloor_depth_m) << "\n";
    out << "sea_state = " << environment.sea_state << "\n";
    out << "shipping_level = " << fmt(environment.shipping_level) << "\n";
    out << "ph = " << fmt(environment.ph) << "\n";
    out << "\n[sonar]\n";
    out << "frequency_khz = " << fmt(sonar.frequency_khz) << "\n";
    out << "source_level_db = " << fmt(sonar.source_level_db) << "\n";
    out << "pulse_length_s = " << fmt(sonar.pulse_length_s) << "\n";
    out << "range_resolution_m = " << fmt(sonar.range_resolution_m) << "\n";
    out << "max_range_m = " << fmt(sonar.max_range_m) << "\n";
    out << "ping_interval_s = " << fmt(sonar.ping_interval_s) << "\n";
    out << "\n[beams]\n";
    out << "forward_width_deg = " << fmt(beams.forward_width_deg) << "\n";
    out << "side_width_deg = " << fmt(beams.side_width_deg) << "\n";
    out << "side_center_deg = " << fmt(beams.side_center_deg) << "\n";
    out << "forward_elements = " << beams.forward_elements << "\n";
    out << "forward_spacing_wl = " << fmt(beams.forward_spacing_wl) << "\n";
    out << "side_elements = " << beams.side_elements << "\n";
    out << "side_spacing_wl = " << fmt(beams.side_spacing_wl) << "\n";
    out << "\n[scatter]\n";
    out << "lambert_mu_db = " << fmt(scatter.lambert_mu_db) << "\n";
    out << "volume_scattering_db = " << fmt(scatter.volume_scattering_db) << "\n";
    out << "\n[source]\n";
    out << "auto_source_level = " << (source.auto_source_level ? "true" : "false") << "\n";
    out << "margin_db = " << fmt(source.margin_db) << "\n";
    out << "calibration_ts_db = " << fmt(source.calibration_ts_db) << "\n";
    out << "\n[occupancy]\n";
    out << "prior_occupied = " << fmt(occupancy.prior_occupied) << "\n";
    out << "sensor_noise_std_db = " << fmt(occupancy.sensor_noise_std_db) << "\n";
    out << "nominal_target_strength_db = " << fmt(occupancy.nominal_target_strength_db) << "\n";
    out << "gauss_hermite_nodes = " << occupancy.gauss_hermite_nodes << "\n";
    out << "overlap_quadrature_n = " << occupancy.overlap_quadrature_n << "\n";
    out << "\n[decision]\n";
    out << "action_costs = " << fmt(decision.action_costs) << "\n";
    out << "collision_cost = " << fmt(decision.collision_cost) << "\n";
    out << "cost_pass_empty = " << fmt(decision.cost_pass_empty) << "\n";
    out << "cost_intervene_empty = " << fmt(decision.cost_intervene_empty) << "\n";
    out << "cost_pass_occupied = " << fmt(decision.cost_pass_occupied) << "\n";
    out << "cost_intervene_occupied = " << fmt(decision.cost_intervene_occupied) << "\n";
    out << "intervention_blind_cost = " << fmt(decision.intervention_blind_cost) << "\n";
    out << "threat_horizon_s = " << fmt(decision.threat_horizon_s) << "\n";
    out << "plan_horizon_s = " << fmt(decision.plan_horizon_s) << "\n";
    out << "n_trajectory_samples = " << decision.n_trajectory_samples << "\n";
    out << "trajectory_yaw_rate_std = " << fmt(decision.trajectory_yaw_rate_std) << "\n";
    out << "trajectory_speed_std = " << fmt(decision.trajectory_speed_std) << "\n";
    out << "\n[vehicle]\n";
    out << "surge_mps = " << fmt(vehicle.surge_mps) << "\n";
    out << "max_yaw_rate_rps = " << fmt(vehicle.max_yaw_rate_rps) << "\n";
    out << "max_yaw_accel_rps2 = " << fmt(vehicle.max_yaw_accel_rps2) << "\n";
    out << "radius_m = " << fmt(vehicle.radius_m) << "\n";
    out << "control_dt_s = " << fmt(vehicle.control_dt_s) << "\n";
    out << "heading_hold_gain_per_s = " << fmt(vehicle.heading_hold_gain_per_s) << "\n";
    out << "surge_bias_mps = " << fmt(vehicle.surge_bias_mps) << "\n";
    out << "surge_noise_std_mps = " << fmt(vehicle.surge_noise_std_mps) << "\n";
    out << "yaw_bias_rps = " << fmt(vehicle.yaw_bias_rps) << "\n";
    out << "yaw_noise_std_rps = " << fmt(vehicle.yaw_noise_std_rps) << "\n";
    out << "belief_surge_std_mps = " << fmt(vehicle.belief_surge_std_mps) << "\n";
    out << "belief_yaw_std_rps = " << fmt(vehicle.belief_yaw_std_rps) << "\n";
    out << "\n[world]\n";
    out << "extent_x_m = " << fmt(world.extent_x_m) << "\n";
    out << "extent_y_m = " << fmt(world.extent_y_m) << "\n";
    out << "start_x_m = " << fmt(world.start_x_m) << "\n";
    out << "start_y_m = " << fmt(world.start_y_m) << "\n";
    out << "start_heading_rad = " << fmt(world.start_heading_rad) << "\n";
    out << "obstacle_x_min_m = " << fmt(world.obstacle_x_min_m) << "\n";
    out << "obstacle_x_max_m = " << fmt(world.obstacle_x_max_m) << "\n";
    out << "n_obstacles = " << world.n_obstacles << "\n";
    out << "obstacle_radius_m = " << fmt(world.obstacle_radius_m) << "\n";
    out << "ts_min_db = " << fmt(world.ts_min_db) << "\n";
    out << "ts_max_db = " << fmt(world.ts_max_db) << "\n";
    out << "max_place_attempts = " << world.max_place_attempts << "\n";
    out << "max_epochs = " << world.max_epochs << "\n";
    out << "\n[experiments]\n";
    out << "runs = " << experiments.runs << "\n";
    out << "master_seed = " << experiments.master_seed << "\n";
    out << "threads = " << experiments.threads << "\n";
    out << "confidence = " << fmt(experiments.confidence) << "\n";
    out << "density_values = " << fmt(experiments.density_values) << "\n";
    out << "radius_values = " << fmt(experiments.radius_values) << "\n";
    out << "surge_error_values_kn = " << fmt(experiments.surge_error_values_kn) << "\n";
    out << "yaw_error_values = " << fmt(experiments.yaw_error_values) << "\n";
    out << "altitude_values = " << fmt(experiments.altitude_values) << "\n";
    return out.str();
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t Config::hash() const { return fnv1a64(to_toml()); }

std::vector<acoustics::BeamSpec> Config::build_beams(BeamMode mode) const {
    beams.validate();
    double fw = beams.forward_width_deg / 2.0;
    acoustics::BeamSpec forward = acoustics::make_line_array(
        0.0, -fw, fw, beams.forward_elements, beams.forward_spacing_wl);
    if (mode == BeamMode::Single) return {forward};
    double sw = beams.side_width_deg / 2.0;
    double sc = beams.side_center_deg;
    acoustics::BeamSpec low = acoustics::make_line_array(-sc, -sc - sw, -sc + sw,
                                                         beams.side_elements, beams.side_spacing_wl);
    acoustics::BeamSpec high = acoustics::make_line_array(sc, sc - sw, sc + sw,
                                                          beams.side_elements, beams.side_spacing_wl);
    return {low, forward, high};
}

}  // namespace flsim
