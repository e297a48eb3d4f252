#pragma once

#include <vector>

#include "flsim/acoustics.hpp"

namespace flsim::occupancy {

// Polar grid in the vehicle frame: rows are range bins of length
// cell_length_m starting at the vehicle, columns are the beam sectors.
// Cell (i, j) covers ranges (i*l, (i+1)*l] and bearings (lo_j, hi_j].
struct GridGeometry {
    double cell_length_m = 0.5;
    int n_ranges = 0;
    std::vector<double> col_lo_rad;
    std::vector<double> col_hi_rad;

    int n_cols() const { return static_cast<int>(col_lo_rad.size()); }
    int n_cells() const { return n_ranges * n_cols(); }
    int cell_index(int i_range, int j_col) const { return i_range * n_cols() + j_col; }

    double r_lo(int i) const { return i * cell_length_m; }
    double r_hi(int i) const { return (i + 1) * cell_length_m; }
    double r_mid(int i) const { return (i + 0.5) * cell_length_m; }
    double max_range() const { return n_ranges * cell_length_m; }
    double col_width_rad(int j) const { return col_hi_rad[static_cast<size_t>(j)] - col_lo_rad[static_cast<size_t>(j)]; }
    double cell_area(int i, int j) const;

    // Cell containing the vehicle-frame point, -1 if outside the grid.
    int locate(double x_m, double y_m) const;
    int locate_polar(double range_m, double bearing_rad) const;

    void validate() const;
    static GridGeometry from_beams(const std::vector<acoustics::BeamSpec>& beams,
                                   double cell_length_m, double max_range_m);
};

class OccupancyMap {
  public:
    OccupancyMap(GridGeometry geom, double prior);

    const GridGeometry& geometry() const { return geom_; }
    double at(int i_range, int j_col) const { return p_[static_cast<size_t>(geom_.cell_index(i_range, j_col))]; }
    double& at(int i_range, int j_col) { return p_[static_cast<size_t>(geom_.cell_index(i_range, j_col))]; }
    const std::vector<double>& probabilities() const { return p_; }
    std::vector<double>& probabilities() { return p_; }
    void reset(double prior);

  private:
    GridGeometry geom_;
    std::vector<double> p_;
};

// Cell-indexed mean measurement levels under the two hypotheses: the
// empty-cell mean is the background floor, the occupied-cell mean adds the
// echo of a nominal-strength target at the bin center on the boresight.
struct PredictedLevels {
    std::vector<double> occupied_db;
    std::vector<double> empty_db;
};

PredictedLevels predicted_levels(const GridGeometry& geom,
                                 const std::vector<acoustics::BeamSpec>& beams,
                                 const std::vector<std::vector<acoustics::BinLevels>>& floors,
                                 const acoustics::SonarParams& sonar,
                                 const acoustics::EnvironmentParams& env,
                                 double nominal_target_strength_db);

// Per-cell binary Bayes update with Gaussian level likelihoods (common std),
// computed in log-odds form. Cells already at 0 or 1 are absorbing.
void bayes_update(OccupancyMap& map, const std::vector<double>& measured_db,
                  const PredictedLevels& predicted, double noise_std_db);

// Convex propagation kernel: for each target cell, sources with weights
// summing to coverage <= 1; for the uncovered remainder the cell keeps its
// own previous probability, so unknown inflow never manufactures evidence.
struct SparseKernel {
    struct Entry {
        int source;
        double weight;
    };
    std::vector<std::vector<Entry>> rows;
    std::vector<double> coverage;
    bool identity = false;

    void apply(const std::vector<double>& src, std::vector<double>& dst) const;
};

// Translational kernel for displacement along +x distributed as
// N(mean_dx, std_dx^2), integrated by Gauss-Hermite quadrature (gh_nodes
// points; a zero std collapses to the mean displacement). Cell overlap is
// integrated on a quad_n x quad_n midpoint rule in (r, theta) over the
// target cell, so per-target weights sum to at most 1 by construction.
SparseKernel build_translation_kernel(const GridGeometry& geom, double mean_dx_m, double std_dx_m,
                                      int gh_nodes, int quad_n);

// Rotational kernel for a heading change distributed as
// N(mean_dpsi, std_dpsi^2). Content moves only within its own ring; the
// transfer weight is the angular overlap divided by the target width.
SparseKernel build_rotation_kernel(const GridGeometry& geom, double mean_dpsi_rad,
                                   double std_dpsi_rad, int gh_nodes);

// Applies translation then rotation.
void propagate(OccupancyMap& map, const SparseKernel& translation, const SparseKernel& rotation);

// Euclidean distance from a vehicle-frame point to the closed polar cell
// (i, j); zero when the point lies inside the cell.
double point_cell_distance(const GridGeometry& geom, int i_range, int j_col, double x_m,
                           double y_m);

}  // namespace flsim::occupancy
