#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flsim/acoustics.hpp"
#include "flsim/toml.hpp"

namespace flsim {

inline constexpr const char* kVersion = "1.0.0";

enum class BeamMode { Single, Three };

const char* beam_mode_name(BeamMode mode);
BeamMode beam_mode_from_name(const std::string& name);

// Array geometry for the forward beam and the two side beams. Spacings are
// in wavelengths; the defaults are solved so the one-way pattern is exactly
// `width/2` degrees off axis at the 5 dB-down point.
struct BeamGeometryParams {
    double forward_width_deg = 10.0;
    double side_width_deg = 20.0;
    double side_center_deg = 15.0;
    int forward_elements = 13;
    double forward_spacing_wl = 0.492730726;
    int side_elements = 7;
    double side_spacing_wl = 0.461895353;

    void validate() const;
};

struct ScatterParams {
    double lambert_mu_db = -27.0;
    double volume_scattering_db = -70.0;

    void validate() const;
};

// When auto_source_level is set, the source level is solved per environment
// so a -30 dB target at max range on the forward boresight sits
// source_level_margin_db above the empty-cell predicted level.
struct SourceLevelParams {
    bool auto_source_level = true;
    double margin_db = 3.0;
    double calibration_ts_db = -30.0;

    void validate() const;
};

struct OccupancyParams {
    double prior_occupied = 0.5;
    double sensor_noise_std_db = 3.0;
    double nominal_target_strength_db = -25.0;
    int gauss_hermite_nodes = 5;
    int overlap_quadrature_n = 64;  // points per axis when integrating cell overlap

    void validate() const;
};

struct DecisionParams {
    // Multi-action risk R(a_k) = action_cost[k] + collision_cost * p_k.
    std::vector<double> action_costs = {0.0, 1.0, 1.0};
    double collision_cost = 100.0;
    // Two-action threshold costs (row: true state empty/occupied).
    double cost_pass_empty = 0.0;      // C00
    double cost_intervene_empty = 1.0;  // C10
    double cost_pass_occupied = 100.0;  // C01
    double cost_intervene_occupied = 0.0;  // C11
    // Flat surcharge on every intervention for the chance that the maneuver
    // itself hits something outside the field of view.
    double intervention_blind_cost = 0.0;
    double threat_horizon_s = 3.0;
    double plan_horizon_s = 10.0;
    int n_trajectory_samples = 15;
    double trajectory_yaw_rate_std = 0.05;  // rad/s dispersion within an action
    double trajectory_speed_std = 0.1;      // m/s dispersion within an action

    void validate() const;
};

struct VehicleParams {
    double surge_mps = 2.57222;  // 5 kn
    double max_yaw_rate_rps = 0.3;
    double max_yaw_accel_rps2 = 0.5;
    double radius_m = 0.5;
    double control_dt_s = 0.1;
    // Proportional heading-hold applied while not intervening: the cruise
    // command is clamp(-gain * believed_heading, +/-max_yaw_rate). Zero
    // disables course recovery after an avoidance turn.
    double heading_hold_gain_per_s = 0.5;
    // Actuation disturbances applied by the plant, unknown to the planner.
    double surge_bias_mps = 0.0;
    double surge_noise_std_mps = 0.0;
    double yaw_bias_rps = 0.0;
    double yaw_noise_std_rps = 0.0;
    // Velocity belief spread used by the map propagation quadrature.
    double belief_surge_std_mps = 0.1;
    double belief_yaw_std_rps = 0.01;

    void validate() const;
};

struct WorldParams {
    double extent_x_m = 100.0;
    double extent_y_m = 100.0;
    double start_x_m = 0.0;
    double start_y_m = 50.0;
    double start_heading_rad = 0.0;
    double obstacle_x_min_m = 50.0;
    double obstacle_x_max_m = 100.0;
    int n_obstacles = 10;
    double obstacle_radius_m = 2.0;
    double ts_min_db = -30.0;
    double ts_max_db = -20.0;
    int max_place_attempts = 10000;
    int max_epochs = 200;

    void validate() const;
};

struct ExperimentParams {
    int runs = 200;
    std::uint64_t master_seed = 12345;
    int threads = 0;  // 0 = hardware concurrency
    double confidence = 0.95;
    std::vector<double> density_values = {1, 3, 5, 10, 20, 30};
    std::vector<double> radius_values = {0.5, 1.0, 2.0, 3.0, 4.0};
    std::vector<double> surge_error_values_kn = {-2.5, 0.0, 2.5};
    std::vector<double> yaw_error_values = {0.0, 0.01};
    std::vector<double> altitude_values = {3.0, 10.0, 25.0, 50.0};

    void validate() const;
};

struct Config {
    acoustics::EnvironmentParams environment;
    acoustics::SonarParams sonar;
    BeamGeometryParams beams;
    ScatterParams scatter;
    SourceLevelParams source;
    OccupancyParams occupancy;
    DecisionParams decision;
    VehicleParams vehicle;
    WorldParams world;
    ExperimentParams experiments;

    static Config from_file(const std::string& path);
    static Config from_toml(const toml::Table& table);

    void validate() const;
    std::string to_toml() const;
    std::uint64_t hash() const;  // FNV-1a over the canonical serialization

    std::vector<acoustics::BeamSpec> build_beams(BeamMode mode) const;
};

std::uint64_t fnv1a64(const std::string& data);

}  // namespace flsim
