#pragma once

#include <array>
#include <vector>

#include "flsim/config.hpp"
#include "flsim/occupancy.hpp"

namespace flsim::decision {

// Action indices: 0 straight, 1 turn left (positive yaw), 2 turn right.
inline constexpr int kNumActions = 3;
inline constexpr int kStraight = 0;
inline constexpr int kLeft = 1;
inline constexpr int kRight = 2;

struct LossModel {
    double c00 = 0.0;    // correct non-intervention
    double c10 = 1.0;    // false alarm
    double c01 = 100.0;  // collision
    double c11 = 0.0;    // correct intervention
    std::array<double, kNumActions> action_costs = {0.0, 1.0, 1.0};
    double collision_cost = 100.0;

    static LossModel from_params(const DecisionParams& params);
    void validate() const;
};

// One sampled trajectory: equally weighted, with the cells its swept disc
// touches, split at the threat interval.
struct SampledTrajectory {
    double weight = 0.0;
    std::vector<int> cells_threat;   // within tau, sorted unique
    std::vector<int> cells_horizon;  // within T, sorted unique
};

// Deterministic stratified trajectory bundles for the three actions,
// integrated on the unicycle model with yaw-acceleration-limited ramp-in.
// The pass action follows the closed-loop heading-hold law from the given
// believed heading error, so it models resuming the transit course; with a
// zero gain or zero error it reduces to a straight arc.
class TrajectoryEnsemble {
  public:
    static TrajectoryEnsemble build(const occupancy::GridGeometry& geom,
                                    const VehicleParams& vehicle, const DecisionParams& params,
                                    double heading_error_rad = 0.0);

    const std::vector<SampledTrajectory>& samples(int action) const;
    double crossing_probability(int action, int cell, bool threat_window) const;
    int n_cells() const { return n_cells_; }

  private:
    std::array<std::vector<SampledTrajectory>, kNumActions> samples_;
    int n_cells_ = 0;
};

// Multi-action posterior expected loss: C0k + C1 * p.
double posterior_risk(double action_cost, double collision_cost, double p_h1);

// Two-action posterior expected loss for decision i (0 pass, 1 intervene).
double posterior_risk_two(int decision_i, const LossModel& loss, double p_h1);

// Likelihood-ratio threshold rule: intervene iff
// p/(1-p) > (C10 - C00)/(C01 - C11).
bool threshold_decide(double p_h1, const LossModel& loss);

// Paper collision model: sum over cells of p(cell occupied) * p(trajectory
// sweeps cell), clamped into [0, 1].
double collision_probability(const occupancy::OccupancyMap& map,
                             const TrajectoryEnsemble& ensemble, int action, bool threat_window);

// Argmin of posterior risk over the three actions at the planning horizon;
// ties break toward straight, then the lower index.
int select_action(const occupancy::OccupancyMap& map, const TrajectoryEnsemble& ensemble,
                  const LossModel& loss, std::array<double, kNumActions>* risks_out = nullptr);

// Fréchet upper bound for "every escape collides": the minimum collision
// probability over straight and both maximum-rate arcs within the threat
// interval.
double unavoidable_collision_probability(const occupancy::OccupancyMap& map,
                                         const TrajectoryEnsemble& ensemble);

}  // namespace flsim::decision
