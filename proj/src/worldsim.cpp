#include "flsim/worldsim.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "flsim/errors.hpp"

namespace flsim::worldsim {

namespace {

constexpr double kRadToDeg = 180.0 / M_PI;

void hash_double(std::uint64_t& h, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    for (int k = 0; k < 8; ++k) {
        h ^= (bits >> (8 * k)) & 0xffu;
        h *= 1099511628211ull;
    }
}

// Bearing of (dx, dy) relative to heading psi, wrapped to (-pi, pi].
double relative_bearing(double dx, double dy, double psi) {
    double b = std::atan2(dy, dx) - psi;
    b = std::fmod(b, 2.0 * M_PI);
    if (b <= -M_PI) b += 2.0 * M_PI;
    if (b > M_PI) b -= 2.0 * M_PI;
    return b;
}

}  // namespace

std::uint64_t World::hash() const {
    std::uint64_t h = 1469598103934665603ull;
    hash_double(h, extent_x_m);
    hash_double(h, extent_y_m);
    for (const Obstacle& o : obstacles) {
        hash_double(h, o.x_m);
        hash_double(h, o.y_m);
        hash_double(h, o.radius_m);
        hash_double(h, o.target_strength_db);
    }
    return h;
}

World generate_world(const WorldParams& params, std::uint64_t seed) {
    params.validate();
    World world;
    world.extent_x_m = params.extent_x_m;
    world.extent_y_m = params.extent_y_m;
    world.obstacles.reserve(static_cast<size_t>(params.n_obstacles));

    RandomStream rng(seed);
    for (int n = 0; n < params.n_obstacles; ++n) {
        bool placed = false;
        for (int attempt = 0; attempt < params.max_place_attempts; ++attempt) {
            double x = rng.uniform(params.obstacle_x_min_m, params.obstacle_x_max_m);
            double y = rng.uniform(0.0, params.extent_y_m);
            bool ok = std::hypot(x - params.start_x_m, y - params.start_y_m) >
                      params.obstacle_radius_m;
            for (const Obstacle& o : world.obstacles) {
                if (!ok) break;
                ok = std::hypot(x - o.x_m, y - o.y_m) > o.radius_m + params.obstacle_radius_m;
            }
            if (!ok) continue;
            Obstacle o;
            o.x_m = x;
            o.y_m = y;
            o.radius_m = params.obstacle_radius_m;
            o.target_strength_db = rng.uniform(params.ts_min_db, params.ts_max_db);
            world.obstacles.push_back(o);
            placed = true;
            break;
        }
        if (!placed) {
            throw DomainError("world generation failed: could not place obstacle " +
                              std::to_string(n + 1) + " of " +
                              std::to_string(params.n_obstacles) + " within " +
                              std::to_string(params.max_place_attempts) + " attempts");
        }
    }
    return world;
}

CollisionCheck check_collision(const World& world, double x_m, double y_m,
                               double vehicle_radius_m) {
    CollisionCheck result;
    for (const Obstacle& o : world.obstacles) {
        double gap = std::hypot(x_m - o.x_m, y_m - o.y_m) - o.radius_m - vehicle_radius_m;
        result.clearance_m = std::min(result.clearance_m, gap);
    }
    result.collided = result.clearance_m <= 0.0;
    return result;
}

void unicycle_step(VehicleState& state, double target_yaw_rate_rps, double dt_s,
                   const VehicleParams& params, RandomStream* plant_noise) {
    double target = std::clamp(target_yaw_rate_rps, -params.max_yaw_rate_rps,
                               params.max_yaw_rate_rps);
    state.yaw_rate_cmd_rps =
        ramp_toward(state.yaw_rate_cmd_rps, target, params.max_yaw_accel_rps2 * dt_s);

    double surge_noise = 0.0;
    double yaw_noise = 0.0;
    if (plant_noise != nullptr) {
        surge_noise = params.surge_noise_std_mps * plant_noise->normal();
        yaw_noise = params.yaw_noise_std_rps * plant_noise->normal();
    }
    state.surge_true_mps = state.surge_believed_mps + params.surge_bias_mps + surge_noise;
    state.yaw_rate_true_rps = state.yaw_rate_cmd_rps + params.yaw_bias_rps + yaw_noise;

    state.pose = euler_step(state.pose, state.surge_true_mps, state.yaw_rate_true_rps, dt_s);
}

std::vector<double> synthesize_ping(const World& world, const Pose2& pose,
                                    const occupancy::GridGeometry& geom,
                                    const std::vector<acoustics::BeamSpec>& beams,
                                    const std::vector<std::vector<acoustics::BinLevels>>& floors,
                                    const acoustics::SonarParams& sonar,
                                    const acoustics::EnvironmentParams& env,
                                    RandomStream* fluctuations) {
    int n_cols = geom.n_cols();
    if (static_cast<int>(beams.size()) != n_cols || static_cast<int>(floors.size()) != n_cols)
        throw DimensionError("ping synthesis: beams/floors do not match the grid");

    // Mean linear power per cell: background floor first.
    std::vector<double> power(static_cast<size_t>(geom.n_cells()), 0.0);
    for (int j = 0; j < n_cols; ++j) {
        if (static_cast<int>(floors[static_cast<size_t>(j)].size()) != geom.n_ranges)
            throw DimensionError("ping synthesis: floor profile length mismatch");
        for (int i = 0; i < geom.n_ranges; ++i) {
            power[static_cast<size_t>(geom.cell_index(i, j))] =
                acoustics::db_to_power(floors[static_cast<size_t>(j)][static_cast<size_t>(i)].floor_db);
        }
    }

    // Obstacle echoes: one bin per disc (the bin holding its center range),
    // every beam, pattern-weighted at the disc's bearing.
    for (const Obstacle& o : world.obstacles) {
        double dx = o.x_m - pose.x;
        double dy = o.y_m - pose.y;
        double range = std::hypot(dx, dy);
        if (range <= 1e-9 || range > geom.max_range()) continue;
        int bin = static_cast<int>(std::ceil(range / geom.cell_length_m)) - 1;
        bin = std::clamp(bin, 0, geom.n_ranges - 1);
        double bearing_deg = relative_bearing(dx, dy, pose.psi) * kRadToDeg;
        for (int j = 0; j < n_cols; ++j) {
            double el = acoustics::echo_level(o.target_strength_db, range, bearing_deg,
                                              beams[static_cast<size_t>(j)], sonar, env);
            power[static_cast<size_t>(geom.cell_index(bin, j))] += acoustics::db_to_power(el);
        }
    }

    // One multiplicative fluctuation per cell, in beam-major order so the
    // draw sequence does not depend on obstacle placement.
    if (fluctuations != nullptr) {
        for (int j = 0; j < n_cols; ++j) {
            for (int i = 0; i < geom.n_ranges; ++i) {
                power[static_cast<size_t>(geom.cell_index(i, j))] *= fluctuations->rayleigh();
            }
        }
    }

    std::vector<double> levels(power.size());
    for (size_t k = 0; k < power.size(); ++k) levels[k] = acoustics::power_to_db(power[k]);
    return levels;
}

EpisodeContext EpisodeContext::build(const Config& config, BeamMode mode) {
    config.validate();
    EpisodeContext ctx;
    ctx.config = config;
    ctx.mode = mode;
    ctx.beams = config.build_beams(mode);

    // The forward beam is the one aimed at zero; it is identical in both
    // modes, so both calibrate to the same source level.
    size_t forward = 0;
    for (size_t b = 1; b < ctx.beams.size(); ++b) {
        if (std::abs(ctx.beams[b].center_angle_deg) <
            std::abs(ctx.beams[forward].center_angle_deg))
            forward = b;
    }
    if (config.source.auto_source_level) {
        ctx.config.sonar.source_level_db = acoustics::calibrate_source_level(
            ctx.beams[forward], config.sonar, config.environment, config.scatter.lambert_mu_db,
            config.scatter.volume_scattering_db, config.source.calibration_ts_db,
            config.source.margin_db);
    }

    ctx.geom = occupancy::GridGeometry::from_beams(ctx.beams, config.sonar.range_resolution_m,
                                                   config.sonar.max_range_m);
    ctx.floors.reserve(ctx.beams.size());
    for (const acoustics::BeamSpec& beam : ctx.beams) {
        ctx.floors.push_back(acoustics::floor_profile(beam, ctx.config.sonar, config.environment,
                                                      config.scatter.lambert_mu_db,
                                                      config.scatter.volume_scattering_db));
    }
    ctx.predicted =
        occupancy::predicted_levels(ctx.geom, ctx.beams, ctx.floors, ctx.config.sonar,
                                    config.environment, config.occupancy.nominal_target_strength_db);
    double tau = config.sonar.ping_interval_s;
    ctx.translation = occupancy::build_translation_kernel(
        ctx.geom, config.vehicle.surge_mps * tau, config.vehicle.belief_surge_std_mps * tau,
        config.occupancy.gauss_hermite_nodes, config.occupancy.overlap_quadrature_n);
    ctx.ensemble = decision::TrajectoryEnsemble::build(ctx.geom, config.vehicle, config.decision);
    ctx.loss = decision::LossModel::from_params(config.decision);
    return ctx;
}

EpisodeOutcome run_episode(const EpisodeContext& ctx, const World& world,
                           std::uint64_t master_seed, std::uint64_t episode_index,
                           EpisodeLog* log) {
    const Config& cfg = ctx.config;
    const WorldParams& wp = cfg.world;
    const VehicleParams& vp = cfg.vehicle;
    double tau = cfg.sonar.ping_interval_s;

    RandomStream plant(master_seed, episode_index, StreamTag::Dynamics);
    RandomStream ping_rng(master_seed, episode_index, StreamTag::Ping);

    occupancy::OccupancyMap map(ctx.geom, cfg.occupancy.prior_occupied);

    VehicleState st;
    st.pose = Pose2{wp.start_x_m, wp.start_y_m, wp.start_heading_rad};
    st.surge_believed_mps = vp.surge_mps;

    EpisodeOutcome out;
    if (log != nullptr) log->world_hash = world.hash();

    CollisionCheck start_check = check_collision(world, st.pose.x, st.pose.y, vp.radius_m);
    out.min_clearance_m = start_check.clearance_m;
    if (start_check.collided) {
        out.collided = true;
        out.path.push_back(st.pose);
        return out;
    }

    int steps_per_epoch = std::max(1, static_cast<int>(std::lround(tau / vp.control_dt_s)));
    double dt = tau / steps_per_epoch;

    int last_action = decision::kStraight;
    int hold_direction = decision::kRight;  // flipped before first use, so first turn is left
    double believed_dpsi = 0.0;
    double psi_believed = wp.start_heading_rad;
    // The pass action models course recovery from the current believed
    // heading error; its ensemble is rebuilt whenever that error moves.
    const decision::TrajectoryEnsemble* ensemble = &ctx.ensemble;
    decision::TrajectoryEnsemble recovery_ensemble;
    double ensemble_err = 0.0;
    bool done = false;

    for (int epoch = 0; epoch < wp.max_epochs && !done; ++epoch) {
        out.epochs = epoch + 1;
        out.path.push_back(st.pose);

        double heading_err = std::remainder(psi_believed - wp.start_heading_rad, 2.0 * M_PI);
        if (vp.heading_hold_gain_per_s > 0.0 && std::abs(heading_err - ensemble_err) > 1e-9) {
            recovery_ensemble =
                decision::TrajectoryEnsemble::build(ctx.geom, vp, cfg.decision, heading_err);
            ensemble = &recovery_ensemble;
            ensemble_err = heading_err;
        }

        std::vector<double> ping = synthesize_ping(world, st.pose, ctx.geom, ctx.beams,
                                                   ctx.floors, cfg.sonar, cfg.environment,
                                                   &ping_rng);
        if (epoch > 0) {
            occupancy::SparseKernel rotation = occupancy::build_rotation_kernel(
                ctx.geom, believed_dpsi, vp.belief_yaw_std_rps * tau,
                cfg.occupancy.gauss_hermite_nodes);
            occupancy::propagate(map, ctx.translation, rotation, cfg.occupancy.prior_occupied);
        }
        occupancy::bayes_update(map, ping, ctx.predicted, cfg.occupancy.sensor_noise_std_db);

        std::array<double, decision::kNumActions> probs{};
        for (int a = 0; a < decision::kNumActions; ++a)
            probs[static_cast<size_t>(a)] =
                decision::collision_probability(map, *ensemble, a, /*threat_window=*/false);

        std::array<double, decision::kNumActions> risks{};
        double p_h1 = 0.0;
        int action = decision::kStraight;
        if (ctx.mode == BeamMode::Three) {
            action = decision::select_action(map, *ensemble, ctx.loss, &risks);
            p_h1 = probs[decision::kStraight];
        } else {
            // CA1: threshold the probability of a straight-path collision
            // over the planning horizon.
            p_h1 = probs[decision::kStraight];
            bool intervene = decision::threshold_decide(p_h1, ctx.loss);
            if (intervene) {
                if (last_action == decision::kStraight) {
                    hold_direction = (hold_direction == decision::kLeft) ? decision::kRight
                                                                         : decision::kLeft;
                }
                action = hold_direction;
            }
            risks[decision::kStraight] = decision::posterior_risk_two(0, ctx.loss, p_h1);
            risks[decision::kLeft] = decision::posterior_risk_two(1, ctx.loss, p_h1);
            risks[decision::kRight] = risks[decision::kLeft];
        }
        if (action != decision::kStraight && last_action == decision::kStraight)
            ++out.interventions;
        last_action = action;

        if (log != nullptr) {
            EpochRecord rec;
            rec.epoch = epoch;
            rec.x = st.pose.x;
            rec.y = st.pose.y;
            rec.psi = st.pose.psi;
            rec.action = action;
            rec.collision_probs = probs;
            rec.risks = risks;
            rec.p_h1 = p_h1;
            log->records.push_back(rec);
            if (log->dump_maps) log->maps.push_back(map.probabilities());
        }

        believed_dpsi = 0.0;
        for (int k = 0; k < steps_per_epoch && !done; ++k) {
            double target_rate = 0.0;
            if (action == decision::kLeft) {
                target_rate = vp.max_yaw_rate_rps;
            } else if (action == decision::kRight) {
                target_rate = -vp.max_yaw_rate_rps;
            } else if (vp.heading_hold_gain_per_s > 0.0) {
                double err = std::remainder(psi_believed - wp.start_heading_rad, 2.0 * M_PI);
                target_rate = std::clamp(-vp.heading_hold_gain_per_s * err,
                                         -vp.max_yaw_rate_rps, vp.max_yaw_rate_rps);
            }
            unicycle_step(st, target_rate, dt, vp, &plant);
            believed_dpsi += st.yaw_rate_cmd_rps * dt;
            psi_believed += st.yaw_rate_cmd_rps * dt;
            CollisionCheck cc = check_collision(world, st.pose.x, st.pose.y, vp.radius_m);
            out.min_clearance_m = std::min(out.min_clearance_m, cc.clearance_m);
            if (cc.collided) {
                out.collided = true;
                done = true;
            } else if (st.pose.x >= wp.extent_x_m) {
                out.traversed = true;
                done = true;
            } else if (st.pose.x < 0.0 || st.pose.y < 0.0 || st.pose.y > wp.extent_y_m) {
                done = true;  // left the world sideways; neither collision nor traversal
            }
        }
    }

    if (log != nullptr && out.collided && !log->records.empty())
        log->records.back().collided = true;
    out.path.push_back(st.pose);
    return out;
}

}  // namespace flsim::worldsim
