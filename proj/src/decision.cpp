#include "flsim/decision.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "flsim/errors.hpp"
#include "flsim/kinematics.hpp"
#include "flsim/stats.hpp"

namespace flsim::decision {

LossModel LossModel::from_params(const DecisionParams& params) {
    LossModel loss;
    loss.c00 = params.cost_pass_empty;
    loss.c10 = params.cost_intervene_empty + params.intervention_blind_cost;
    loss.c01 = params.cost_pass_occupied;
    loss.c11 = params.cost_intervene_occupied + params.intervention_blind_cost;
    for (int k = 0; k < kNumActions; ++k) {
        loss.action_costs[static_cast<size_t>(k)] = params.action_costs[static_cast<size_t>(k)];
        if (k != kStraight)
            loss.action_costs[static_cast<size_t>(k)] += params.intervention_blind_cost;
    }
    loss.collision_cost = params.collision_cost;
    loss.validate();
    return loss;
}

void LossModel::validate() const {
    if (!(c01 > c11)) throw ConfigError("loss model requires C01 > C11");
    if (!(c10 > c00)) throw ConfigError("loss model requires C10 > C00");
    for (double c : action_costs) {
        if (!(collision_cost > c))
            throw ConfigError("loss model requires collision cost above action costs");
    }
}

namespace {

// Stride coprime to m near the golden section, for pairing the two
// stratification axes without alignment.
int stratified_stride(int m) {
    if (m <= 2) return 1;
    int s = static_cast<int>(std::lround(m * 0.6180339887498949));
    s = std::clamp(s, 1, m - 1);
    while (std::gcd(s, m) != 1) --s;
    return s;
}

// Collects the cells whose distance to (x, y) is at most radius.
void collect_swept_cells(const occupancy::GridGeometry& geom, double x, double y, double radius,
                         std::set<int>& out) {
    double rho = std::hypot(x, y);
    if (rho - radius > geom.max_range()) return;
    int lo = std::max(0, static_cast<int>(std::ceil((rho - radius) / geom.cell_length_m)) - 1);
    int hi = std::min(geom.n_ranges - 1,
                      static_cast<int>(std::ceil((rho + radius) / geom.cell_length_m)) - 1);
    for (int i = lo; i <= hi; ++i) {
        for (int j = 0; j < geom.n_cols(); ++j) {
            if (occupancy::point_cell_distance(geom, i, j, x, y) <= radius)
                out.insert(geom.cell_index(i, j));
        }
    }
}

}  // namespace

TrajectoryEnsemble TrajectoryEnsemble::build(const occupancy::GridGeometry& geom,
                                             const VehicleParams& vehicle,
                                             const DecisionParams& params,
                                             double heading_error_rad) {
    geom.validate();
    vehicle.validate();
    params.validate();
    if (!std::isfinite(heading_error_rad)) throw DomainError("heading error must be finite");

    TrajectoryEnsemble ens;
    ens.n_cells_ = geom.n_cells();
    const int m = params.n_trajectory_samples;
    const int stride = stratified_stride(m);
    const double dt = vehicle.control_dt_s;
    const int steps = static_cast<int>(std::lround(params.plan_horizon_s / dt));
    const int threat_steps = static_cast<int>(std::lround(params.threat_horizon_s / dt));
    const double gain = vehicle.heading_hold_gain_per_s;
    const double targets[kNumActions] = {0.0, vehicle.max_yaw_rate_rps, -vehicle.max_yaw_rate_rps};

    for (int a = 0; a < kNumActions; ++a) {
        ens.samples_[static_cast<size_t>(a)].reserve(static_cast<size_t>(m));
        for (int s = 0; s < m; ++s) {
            double u1 = (s + 0.5) / m;
            double u2 = ((static_cast<long long>(s) * stride) % m + 0.5) / m;
            double omega_offset = params.trajectory_yaw_rate_std * stats::normal_quantile(u1);
            double speed =
                std::max(0.0, vehicle.surge_mps + params.trajectory_speed_std * stats::normal_quantile(u2));

            Pose2 pose;
            double omega = 0.0;
            std::set<int> threat_cells;
            std::set<int> horizon_cells;
            for (int k = 1; k <= steps; ++k) {
                double omega_target;
                if (a == kStraight && gain > 0.0) {
                    // Closed-loop course recovery toward the transit heading.
                    omega_target = std::clamp(-gain * (heading_error_rad + pose.psi),
                                              -vehicle.max_yaw_rate_rps, vehicle.max_yaw_rate_rps);
                } else {
                    omega_target = targets[a];
                }
                omega = ramp_toward(omega, omega_target + omega_offset,
                                    vehicle.max_yaw_accel_rps2 * dt);
                pose = euler_step(pose, speed, omega, dt);
                collect_swept_cells(geom, pose.x, pose.y, vehicle.radius_m,
                                    k <= threat_steps ? threat_cells : horizon_cells);
            }
            horizon_cells.insert(threat_cells.begin(), threat_cells.end());

            SampledTrajectory traj;
            traj.weight = 1.0 / m;
            traj.cells_threat.assign(threat_cells.begin(), threat_cells.end());
            traj.cells_horizon.assign(horizon_cells.begin(), horizon_cells.end());
            ens.samples_[static_cast<size_t>(a)].push_back(std::move(traj));
        }
    }
    return ens;
}

const std::vector<SampledTrajectory>& TrajectoryEnsemble::samples(int action) const {
    if (action < 0 || action >= kNumActions) throw DomainError("action index outside action set");
    return samples_[static_cast<size_t>(action)];
}

double TrajectoryEnsemble::crossing_probability(int action, int cell, bool threat_window) const {
    if (cell < 0 || cell >= n_cells_) throw DimensionError("cell index outside grid");
    double p = 0.0;
    for (const SampledTrajectory& traj : samples(action)) {
        const std::vector<int>& cells = threat_window ? traj.cells_threat : traj.cells_horizon;
        if (std::binary_search(cells.begin(), cells.end(), cell)) p += traj.weight;
    }
    return std::min(p, 1.0);
}

double posterior_risk(double action_cost, double collision_cost, double p_h1) {
    if (!(p_h1 >= 0.0 && p_h1 <= 1.0)) throw DomainError("p_h1 outside [0, 1]");
    return action_cost + collision_cost * p_h1;
}

double posterior_risk_two(int decision_i, const LossModel& loss, double p_h1) {
    if (!(p_h1 >= 0.0 && p_h1 <= 1.0)) throw DomainError("p_h1 outside [0, 1]");
    if (decision_i == 0) return loss.c00 * (1.0 - p_h1) + loss.c01 * p_h1;
    if (decision_i == 1) return loss.c10 * (1.0 - p_h1) + loss.c11 * p_h1;
    throw DomainError("two-action decision index must be 0 or 1");
}

bool threshold_decide(double p_h1, const LossModel& loss) {
    if (!(p_h1 >= 0.0 && p_h1 <= 1.0)) throw DomainError("p_h1 outside [0, 1]");
    return p_h1 * (loss.c01 - loss.c11) > (1.0 - p_h1) * (loss.c10 - loss.c00);
}

double collision_probability(const occupancy::OccupancyMap& map,
                             const TrajectoryEnsemble& ensemble, int action, bool threat_window) {
    const std::vector<double>& p = map.probabilities();
    if (static_cast<int>(p.size()) != ensemble.n_cells())
        throw DimensionError("map and trajectory ensemble geometries differ");
    double total = 0.0;
    for (const SampledTrajectory& traj : ensemble.samples(action)) {
        const std::vector<int>& cells = threat_window ? traj.cells_threat : traj.cells_horizon;
        double along = 0.0;
        for (int c : cells) along += p[static_cast<size_t>(c)];
        total += traj.weight * along;
    }
    return std::clamp(total, 0.0, 1.0);
}

int select_action(const occupancy::OccupancyMap& map, const TrajectoryEnsemble& ensemble,
                  const LossModel& loss, std::array<double, kNumActions>* risks_out) {
    int best = kStraight;
    double best_risk = 0.0;
    std::array<double, kNumActions> risks{};
    for (int a = 0; a < kNumActions; ++a) {
        double p = collision_probability(map, ensemble, a, false);
        risks[static_cast<size_t>(a)] =
            posterior_risk(loss.action_costs[static_cast<size_t>(a)], loss.collision_cost, p);
        if (a == 0 || risks[static_cast<size_t>(a)] < best_risk) {
            best = a;
            best_risk = risks[static_cast<size_t>(a)];
        }
    }
    if (risks_out) *risks_out = risks;
    return best;
}

double unavoidable_collision_probability(const occupancy::OccupancyMap& map,
                                         const TrajectoryEnsemble& ensemble) {
    double p = 1.0;
    for (int a = 0; a < kNumActions; ++a)
        p = std::min(p, collision_probability(map, ensemble, a, true));
    return p;
}

}  // namespace flsim::decision
