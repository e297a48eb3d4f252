#include "flsim/occupancy.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "flsim/errors.hpp"
#include "flsim/stats.hpp"

namespace flsim::occupancy {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kSqrt2 = 1.414213562373095048801688724209698;
constexpr double kZeroShift = 1e-12;

// Displacement quadrature nodes (value, probability weight) for N(mean, std^2).
std::vector<std::pair<double, double>> displacement_nodes(double mean, double std, int gh_nodes) {
    if (std < 0.0) throw DomainError("displacement std must be non-negative");
    if (std == 0.0) return {{mean, 1.0}};
    stats::Quadrature q = stats::gauss_hermite(gh_nodes);
    std::vector<std::pair<double, double>> nodes;
    nodes.reserve(q.nodes.size());
    double inv_sqrt_pi = 1.0 / std::sqrt(kPi);
    for (size_t k = 0; k < q.nodes.size(); ++k)
        nodes.push_back({mean + kSqrt2 * std * q.nodes[k], q.weights[k] * inv_sqrt_pi});
    return nodes;
}

bool all_zero(const std::vector<std::pair<double, double>>& nodes) {
    for (const auto& [d, w] : nodes) {
        if (std::abs(d) >= kZeroShift) return false;
    }
    return true;
}

}  // namespace

double GridGeometry::cell_area(int i, int j) const {
    return 0.5 * (r_hi(i) * r_hi(i) - r_lo(i) * r_lo(i)) * col_width_rad(j);
}

int GridGeometry::locate_polar(double range_m, double bearing_rad) const {
    if (!(range_m > 0.0) || range_m > max_range()) return -1;
    int i = static_cast<int>(std::ceil(range_m / cell_length_m)) - 1;
    if (i < 0 || i >= n_ranges) return -1;
    for (int j = 0; j < n_cols(); ++j) {
        if (bearing_rad > col_lo_rad[static_cast<size_t>(j)] &&
            bearing_rad <= col_hi_rad[static_cast<size_t>(j)])
            return cell_index(i, j);
    }
    return -1;
}

int GridGeometry::locate(double x_m, double y_m) const {
    double r = std::hypot(x_m, y_m);
    if (r == 0.0) return -1;
    return locate_polar(r, std::atan2(y_m, x_m));
}

void GridGeometry::validate() const {
    if (!(cell_length_m > 0.0)) throw DimensionError("cell_length_m must be positive");
    if (n_ranges < 1) throw DimensionError("grid needs at least one range bin");
    if (col_lo_rad.empty() || col_lo_rad.size() != col_hi_rad.size())
        throw DimensionError("grid column bounds are inconsistent");
    for (size_t j = 0; j < col_lo_rad.size(); ++j) {
        if (!(col_lo_rad[j] < col_hi_rad[j])) throw DimensionError("grid column has no width");
        if (j > 0 && col_lo_rad[j] < col_hi_rad[j - 1] - 1e-12)
            throw DimensionError("grid columns overlap");
    }
}

GridGeometry GridGeometry::from_beams(const std::vector<acoustics::BeamSpec>& beams,
                                      double cell_length_m, double max_range_m) {
    if (beams.empty()) throw DimensionError("grid needs at least one beam");
    GridGeometry g;
    g.cell_length_m = cell_length_m;
    double bins = max_range_m / cell_length_m;
    g.n_ranges = static_cast<int>(std::lround(bins));
    if (std::abs(bins - g.n_ranges) > 1e-9)
        throw DimensionError("max_range_m must be an integer multiple of cell_length_m");
    constexpr double kDegToRad = kPi / 180.0;
    for (const auto& b : beams) {
        g.col_lo_rad.push_back(b.cutoff_low_deg * kDegToRad);
        g.col_hi_rad.push_back(b.cutoff_high_deg * kDegToRad);
    }
    g.validate();
    return g;
}

OccupancyMap::OccupancyMap(GridGeometry geom, double prior) : geom_(std::move(geom)) {
    geom_.validate();
    if (!(prior >= 0.0 && prior <= 1.0)) throw DomainError("prior outside [0, 1]");
    p_.assign(static_cast<size_t>(geom_.n_cells()), prior);
}

void OccupancyMap::reset(double prior) {
    if (!(prior >= 0.0 && prior <= 1.0)) throw DomainError("prior outside [0, 1]");
    std::fill(p_.begin(), p_.end(), prior);
}

PredictedLevels predicted_levels(const GridGeometry& geom,
                                 const std::vector<acoustics::BeamSpec>& beams,
                                 const std::vector<std::vector<acoustics::BinLevels>>& floors,
                                 const acoustics::SonarParams& sonar,
                                 const acoustics::EnvironmentParams& env,
                                 double nominal_target_strength_db) {
    if (static_cast<int>(beams.size()) != geom.n_cols() || floors.size() != beams.size())
        throw DimensionError("beam/floor count does not match grid columns");
    PredictedLevels out;
    out.occupied_db.assign(static_cast<size_t>(geom.n_cells()), 0.0);
    out.empty_db.assign(static_cast<size_t>(geom.n_cells()), 0.0);
    for (int j = 0; j < geom.n_cols(); ++j) {
        const auto& beam = beams[static_cast<size_t>(j)];
        const auto& floor = floors[static_cast<size_t>(j)];
        if (static_cast<int>(floor.size()) != geom.n_ranges)
            throw DimensionError("floor profile length does not match grid");
        for (int i = 0; i < geom.n_ranges; ++i) {
            size_t c = static_cast<size_t>(geom.cell_index(i, j));
            double floor_db = floor[static_cast<size_t>(i)].floor_db;
            double echo = acoustics::echo_level(nominal_target_strength_db, geom.r_mid(i),
                                                beam.center_angle_deg, beam, sonar, env);
            out.empty_db[c] = floor_db;
            out.occupied_db[c] =
                acoustics::power_to_db(acoustics::db_to_power(echo) + acoustics::db_to_power(floor_db));
        }
    }
    return out;
}

void bayes_update(OccupancyMap& map, const std::vector<double>& measured_db,
                  const PredictedLevels& predicted, double noise_std_db) {
    const size_t n = map.probabilities().size();
    if (measured_db.size() != n || predicted.occupied_db.size() != n ||
        predicted.empty_db.size() != n)
        throw DimensionError("measurement vector does not match grid");
    if (!(noise_std_db > 0.0)) throw DomainError("noise_std_db must be positive");

    // Keep updated cells strictly inside (0, 1): only a prior set exactly to
    // 0 or 1 is treated as absorbing, a finite measurement never is.
    constexpr double kPClamp = 1e-12;
    std::vector<double>& p = map.probabilities();
    double inv_two_var = 1.0 / (2.0 * noise_std_db * noise_std_db);
    for (size_t c = 0; c < n; ++c) {
        if (p[c] <= 0.0 || p[c] >= 1.0) continue;
        double z = measured_db[c];
        double d0 = z - predicted.empty_db[c];
        double d1 = z - predicted.occupied_db[c];
        double llr = (d0 * d0 - d1 * d1) * inv_two_var;
        double post = stats::logistic(llr + stats::logit(p[c]));
        p[c] = std::clamp(post, kPClamp, 1.0 - kPClamp);
    }
}

void SparseKernel::apply(const std::vector<double>& src, std::vector<double>& dst) const {
    if (identity) {
        dst = src;
        return;
    }
    if (src.size() != rows.size()) throw DimensionError("kernel does not match map size");
    dst.resize(src.size());
    for (size_t t = 0; t < rows.size(); ++t) {
        double acc = 0.0;
        for (const Entry& e : rows[t]) acc += e.weight * src[static_cast<size_t>(e.source)];
        double refill = std::max(0.0, 1.0 - coverage[t]);
        dst[t] = std::clamp(acc + refill * src[t], 0.0, 1.0);
    }
}

SparseKernel build_translation_kernel(const GridGeometry& geom, double mean_dx_m, double std_dx_m,
                                      int gh_nodes, int quad_n) {
    geom.validate();
    if (quad_n < 1) throw DomainError("quad_n must be >= 1");
    auto nodes = displacement_nodes(mean_dx_m, std_dx_m, gh_nodes);

    SparseKernel kernel;
    kernel.rows.resize(static_cast<size_t>(geom.n_cells()));
    kernel.coverage.assign(static_cast<size_t>(geom.n_cells()), 0.0);
    if (all_zero(nodes)) {
        kernel.identity = true;
        return kernel;
    }

    for (int j = 0; j < geom.n_cols(); ++j) {
        double th_lo = geom.col_lo_rad[static_cast<size_t>(j)];
        double dth = geom.col_width_rad(j) / quad_n;
        for (int i = 0; i < geom.n_ranges; ++i) {
            double dr = geom.cell_length_m / quad_n;
            std::map<int, double> acc;
            double denom = 0.0;
            for (int u = 0; u < quad_n; ++u) {
                double r = geom.r_lo(i) + (u + 0.5) * dr;
                denom += r * quad_n;  // same radial weight for every bearing sample
                for (int v = 0; v < quad_n; ++v) {
                    double th = th_lo + (v + 0.5) * dth;
                    double x = r * std::cos(th);
                    double y = r * std::sin(th);
                    for (const auto& [dx, w] : nodes) {
                        int s = geom.locate(x + dx, y);
                        if (s >= 0) acc[s] += w * r;
                    }
                }
            }
            size_t t = static_cast<size_t>(geom.cell_index(i, j));
            double cov = 0.0;
            for (const auto& [s, a] : acc) {
                double weight = a / denom;
                kernel.rows[t].push_back({s, weight});
                cov += weight;
            }
            kernel.coverage[t] = cov;
        }
    }
    return kernel;
}

SparseKernel build_rotation_kernel(const GridGeometry& geom, double mean_dpsi_rad,
                                   double std_dpsi_rad, int gh_nodes) {
    geom.validate();
    auto nodes = displacement_nodes(mean_dpsi_rad, std_dpsi_rad, gh_nodes);

    SparseKernel kernel;
    kernel.rows.resize(static_cast<size_t>(geom.n_cells()));
    kernel.coverage.assign(static_cast<size_t>(geom.n_cells()), 0.0);
    if (all_zero(nodes)) {
        kernel.identity = true;
        return kernel;
    }

    // Column-to-column weights are the same in every ring. A target column
    // draws from the source interval shifted by the heading change.
    int nc = geom.n_cols();
    std::vector<std::vector<double>> w(static_cast<size_t>(nc),
                                       std::vector<double>(static_cast<size_t>(nc), 0.0));
    for (int t = 0; t < nc; ++t) {
        double width_t = geom.col_width_rad(t);
        for (const auto& [dpsi, wk] : nodes) {
            double pre_lo = geom.col_lo_rad[static_cast<size_t>(t)] + dpsi;
            double pre_hi = geom.col_hi_rad[static_cast<size_t>(t)] + dpsi;
            for (int s = 0; s < nc; ++s) {
                double olap = std::min(pre_hi, geom.col_hi_rad[static_cast<size_t>(s)]) -
                              std::max(pre_lo, geom.col_lo_rad[static_cast<size_t>(s)]);
                if (olap > 0.0) w[static_cast<size_t>(t)][static_cast<size_t>(s)] += wk * olap / width_t;
            }
        }
    }
    for (int i = 0; i < geom.n_ranges; ++i) {
        for (int t = 0; t < nc; ++t) {
            size_t cell_t = static_cast<size_t>(geom.cell_index(i, t));
            double cov = 0.0;
            for (int s = 0; s < nc; ++s) {
                double weight = w[static_cast<size_t>(t)][static_cast<size_t>(s)];
                if (weight > 0.0) {
                    kernel.rows[cell_t].push_back({geom.cell_index(i, s), weight});
                    cov += weight;
                }
            }
            kernel.coverage[cell_t] = cov;
        }
    }
    return kernel;
}

void propagate(OccupancyMap& map, const SparseKernel& translation, const SparseKernel& rotation,
               double prior) {
    std::vector<double> tmp;
    translation.apply(map.probabilities(), prior, tmp);
    rotation.apply(tmp, prior, map.probabilities());
}

namespace {

double point_segment_distance(double px, double py, double ax, double ay, double bx, double by) {
    double dx = bx - ax;
    double dy = by - ay;
    double len2 = dx * dx + dy * dy;
    double t = len2 > 0.0 ? ((px - ax) * dx + (py - ay) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(px - (ax + t * dx), py - (ay + t * dy));
}

}  // namespace

double point_cell_distance(const GridGeometry& geom, int i_range, int j_col, double x_m,
                           double y_m) {
    if (i_range < 0 || i_range >= geom.n_ranges || j_col < 0 || j_col >= geom.n_cols())
        throw DimensionError("cell index outside grid");
    double rho = std::hypot(x_m, y_m);
    double th_lo = geom.col_lo_rad[static_cast<size_t>(j_col)];
    double th_hi = geom.col_hi_rad[static_cast<size_t>(j_col)];
    double r_lo = geom.r_lo(i_range);
    double r_hi = geom.r_hi(i_range);
    double phi = std::atan2(y_m, x_m);
    if (rho > 0.0 && phi >= th_lo && phi <= th_hi)
        return std::max({r_lo - rho, rho - r_hi, 0.0});
    double d_lo = point_segment_distance(x_m, y_m, r_lo * std::cos(th_lo), r_lo * std::sin(th_lo),
                                         r_hi * std::cos(th_lo), r_hi * std::sin(th_lo));
    double d_hi = point_segment_distance(x_m, y_m, r_lo * std::cos(th_hi), r_lo * std::sin(th_hi),
                                         r_hi * std::cos(th_hi), r_hi * std::sin(th_hi));
    return std::min(d_lo, d_hi);
}

}  // namespace flsim::occupancy
