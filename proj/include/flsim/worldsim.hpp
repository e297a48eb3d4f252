#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

#include "flsim/acoustics.hpp"
#include "flsim/config.hpp"
#include "flsim/decision.hpp"
#include "flsim/kinematics.hpp"
#include "flsim/occupancy.hpp"
#include "flsim/rng.hpp"

namespace flsim::worldsim {

struct Obstacle {
    double x_m = 0.0;
    double y_m = 0.0;
    double radius_m = 0.0;
    double target_strength_db = 0.0;
};

struct World {
    double extent_x_m = 0.0;
    double extent_y_m = 0.0;
    std::vector<Obstacle> obstacles;

    // FNV-1a over the obstacle fields in placement order; used to verify
    // that paired runs really saw the same world.
    std::uint64_t hash() const;
};

// Rejection-samples obstacle discs: centers uniform over the placement band,
// strengths uniform in [ts_min, ts_max]. A candidate is rejected when its
// disc overlaps an already placed disc or covers the start position; a disc
// that cannot be placed within max_place_attempts draws throws DomainError.
World generate_world(const WorldParams& params, std::uint64_t seed);

struct CollisionCheck {
    bool collided = false;
    double clearance_m = std::numeric_limits<double>::infinity();
};

// Smallest gap between the vehicle disc and any obstacle disc (negative when
// overlapping). An empty world reports +infinity and no collision.
CollisionCheck check_collision(const World& world, double x_m, double y_m,
                               double vehicle_radius_m);

struct VehicleState {
    Pose2 pose;
    double surge_true_mps = 0.0;     // realized by the plant on the last step
    double yaw_rate_true_rps = 0.0;  // realized by the plant on the last step
    double yaw_rate_cmd_rps = 0.0;   // ramped command, known to the controller
    double surge_believed_mps = 0.0;
};

// One control step. The commanded yaw rate slews toward `target_yaw_rate`
// under the acceleration limit and saturates at the rate limit; the plant
// applies bias and noise to the believed surge and the commanded rate; the
// pose advances by one explicit Euler step. The believed state is noise
// free. When `plant_noise` is set, exactly two normal draws are consumed per
// step regardless of the noise magnitudes, so streams stay aligned across
// configurations that differ only in plant parameters.
void unicycle_step(VehicleState& state, double target_yaw_rate_rps, double dt_s,
                   const VehicleParams& params, RandomStream* plant_noise);

// Measured level per grid cell for one ping taken from `pose`: the per-beam
// background floor plus every obstacle's echo. An obstacle contributes to the
// range bin holding its center range, in every beam, with the two-way pattern
// loss evaluated at the disc's bearing. With `fluctuations` set, each cell's
// linear power is scaled by one unit-mean Rayleigh draw (beam-major order);
// without it the trace is deterministic.
std::vector<double> synthesize_ping(const World& world, const Pose2& pose,
                                    const occupancy::GridGeometry& geom,
                                    const std::vector<acoustics::BeamSpec>& beams,
                                    const std::vector<std::vector<acoustics::BinLevels>>& floors,
                                    const acoustics::SonarParams& sonar,
                                    const acoustics::EnvironmentParams& env,
                                    RandomStream* fluctuations);

struct EpochRecord {
    int epoch = 0;
    double x = 0.0;
    double y = 0.0;
    double psi = 0.0;
    int action = 0;
    std::array<double, decision::kNumActions> collision_probs{};
    std::array<double, decision::kNumActions> risks{};
    double p_h1 = 0.0;
    bool collided = false;  // vehicle hit an obstacle before the next epoch
};

struct EpisodeLog {
    std::uint64_t world_hash = 0;
    bool dump_maps = false;
    std::vector<EpochRecord> records;
    std::vector<std::vector<double>> maps;  // post-update snapshot per epoch
};

struct EpisodeOutcome {
    bool collided = false;
    bool traversed = false;  // crossed the far edge of the world
    double min_clearance_m = std::numeric_limits<double>::infinity();
    int interventions = 0;  // transitions from straight to turning
    int epochs = 0;
    std::vector<Pose2> path;  // pose at each ping epoch, plus the final pose
};

// Everything fixed across the episodes of one (config, beam mode) pair:
// beams, calibrated source level, background floors, predicted cell levels,
// grid geometry, the between-ping translation kernel, trajectory ensembles
// and the loss model.
struct EpisodeContext {
    Config config;  // sonar.source_level_db resolved when auto calibration is on
    BeamMode mode = BeamMode::Three;
    std::vector<acoustics::BeamSpec> beams;
    occupancy::GridGeometry geom;
    std::vector<std::vector<acoustics::BinLevels>> floors;
    occupancy::PredictedLevels predicted;
    occupancy::SparseKernel translation;
    decision::TrajectoryEnsemble ensemble;
    decision::LossModel loss;

    static EpisodeContext build(const Config& config, BeamMode mode);
};

// Runs one episode: per ping epoch, synthesize the ping, propagate the map
// by the believed motion since the previous ping, Bayes-update, choose the
// action, then integrate the vehicle across the ping interval at the control
// step. Three-beam mode selects among straight/hard-left/hard-right by
// minimum posterior risk; single-beam mode thresholds the straight-path
// collision probability and holds one turn direction per intervention,
// alternating the direction between interventions (first one goes left).
// Episodes end on collision, on traversing the full extent, on leaving the
// world sideways, or at the epoch limit.
EpisodeOutcome run_episode(const EpisodeContext& ctx, const World& world,
                           std::uint64_t master_seed, std::uint64_t episode_index,
                           EpisodeLog* log = nullptr);

}  // namespace flsim::worldsim
