#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "flsim/errors.hpp"

namespace flsim::acoustics {

struct EnvironmentParams {
    double temperature_c = 10.0;   // bulk water temperature
    double salinity_ppt = 35.0;
    double sonar_depth_m = 50.0;   // depth of the sonar below the surface
    double seafloor_depth_m = 75.0;  // total water column
    int sea_state = 2;             // 0..6
    double shipping_level = 0.5;   // 0..1
    double ph = 8.0;

    double height_above_seafloor() const { return seafloor_depth_m - sonar_depth_m; }
    void validate() const;
};

struct SonarParams {
    double frequency_khz = 675.0;
    double source_level_db = 205.0;  // dB re 1 uPa @ 1 m
    double pulse_length_s = 100e-6;
    double range_resolution_m = 0.5;  // radial cell length l_c (bin-averaged)
    double max_range_m = 50.0;        // must be an integer multiple of l_c
    double ping_interval_s = 1.0;

    int n_range_bins() const;
    void validate() const;
};

// One sonar beam: a physically rotated point-source array plus the cutoff
// angles that bound its map sector. Element positions are 2-D offsets in
// wavelengths; the pattern is the coherent sum over elements, normalized to
// 0 dB on the beam axis.
struct BeamSpec {
    double center_angle_deg = 0.0;
    double cutoff_low_deg = -5.0;
    double cutoff_high_deg = 5.0;
    std::vector<std::array<double, 2>> element_positions_wl;

    double sector_width_deg() const { return cutoff_high_deg - cutoff_low_deg; }
    void validate() const;
};

// Uniform line array across the beam axis, centered, n elements spaced
// `spacing_wl` wavelengths apart.
BeamSpec make_line_array(double center_deg, double cutoff_low_deg, double cutoff_high_deg,
                         int n_elements, double spacing_wl);

// Medwin (1975) shallow-water sound speed polynomial.
// T in [-4, 40] degC, S in [0, 45] ppt, depth in meters. Returns m/s.
double sound_speed(const EnvironmentParams& env);

// Ainslie & McColm (1998) seawater absorption (simplified Francois-Garrison,
// boric acid + magnesium sulfate + viscosity terms with temperature and
// depth corrections). f in kHz, returns dB/km.
double absorption_coeff(double frequency_khz, const EnvironmentParams& env);

// One-way spherical spreading plus absorption: 20 log10(r) + alpha * r / 1000.
// r >= 1 m (reference distance).
double transmission_loss(double range_m, double frequency_khz, const EnvironmentParams& env);

// Pattern loss in dB at `angle_deg` (absolute bearing); 0 dB on the beam axis.
double beam_pattern_loss(const BeamSpec& beam, double angle_deg);

// Same pattern evaluated at an off-axis angle directly (used for the
// vertical plane, where the offset from the beam axis is the grazing
// geometry's depression angle).
double beam_pattern_loss_offaxis(const BeamSpec& beam, double offaxis_deg);

// Four-component ambient noise (turbulence, shipping, wind/sea state,
// thermal), power-summed. Returns spectrum level in dB re 1 uPa^2/Hz.
double ambient_noise_level(double frequency_khz, const EnvironmentParams& env);

// Sea-state to wind-speed mapping used by the wind noise and surface
// backscatter terms. Returns m/s.
double sea_state_wind_speed_mps(int sea_state);

enum class ScatterKind { Seafloor, Surface, Volume };

// Seafloor: Lambert's rule mu + 20 log10(sin g). Surface: Chapman-Harris
// empirical sea-surface curve at the environment's wind speed. Volume:
// constant scattering strength, independent of angle.
double backscatter_strength(ScatterKind kind, double grazing_deg, double frequency_khz,
                            const EnvironmentParams& env, double lambert_mu_db,
                            double volume_scattering_db);

// Active sonar equation echo level for a point target:
// EL = SL - 2 TL(r) + TS - 2 BPL(angle).
double echo_level(double target_strength_db, double range_m, double angle_deg,
                  const BeamSpec& beam, const SonarParams& sonar, const EnvironmentParams& env);

// Mean background levels for one range bin of one beam: reverberation
// (seafloor + surface + volume), broadband noise referred to the pulse
// bandwidth, and their power sum.
struct BinLevels {
    double reverb_db = 0.0;
    double noise_db = 0.0;
    double floor_db = 0.0;
};

// Background profile across all range bins of a beam. Boundary
// reverberation uses exact annulus footprints in ground range, Lambert or
// Chapman-Harris scattering strength at the bin's grazing angle, and the
// two-way vertical pattern rejection at the depression angle (the array is
// taken as symmetric, so the vertical pattern equals the horizontal one).
std::vector<BinLevels> floor_profile(const BeamSpec& beam, const SonarParams& sonar,
                                     const EnvironmentParams& env, double lambert_mu_db,
                                     double volume_scattering_db);

// Solves the source level so a calibration target sits margin_db above the
// empty-cell floor in the last range bin on the forward boresight. The
// echo-to-floor gap is strictly increasing in source level up to the
// reverberation-limited plateau; throws ConfigError when the margin is not
// reachable.
double calibrate_source_level(const BeamSpec& forward_beam, const SonarParams& sonar,
                              const EnvironmentParams& env, double lambert_mu_db,
                              double volume_scattering_db, double calibration_ts_db,
                              double margin_db);

inline double db_to_power(double db) { return std::pow(10.0, db / 10.0); }
inline double power_to_db(double p) { return 10.0 * std::log10(p); }

}  // namespace flsim::acoustics
