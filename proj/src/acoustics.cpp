#include "flsim/acoustics.hpp"

#include <cmath>
#include <complex>
#include <cstdlib>

namespace flsim::acoustics {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kDegToRad = kPi / 180.0;

// Deep pattern nulls are measure-zero artifacts of an ideal array; real
// hardware fills them in. Cap the loss so reverberation evaluated exactly at
// a null stays finite.
constexpr double kMaxPatternLossDb = 40.0;

// WMO sea-state band centers, wind speed in knots.
constexpr double kSeaStateWindKn[7] = {0.0, 2.0, 5.0, 8.5, 13.5, 19.0, 24.5};

constexpr double kKnotToMps = 0.514444;

}  // namespace

void EnvironmentParams::validate() const {
    if (temperature_c < -4.0 || temperature_c > 40.0)
        throw ConfigError("temperature_c outside [-4, 40]");
    if (salinity_ppt < 0.0 || salinity_ppt > 45.0)
        throw ConfigError("salinity_ppt outside [0, 45]");
    if (!(sonar_depth_m > 0.0)) throw ConfigError("sonar_depth_m must be positive");
    if (!(seafloor_depth_m > sonar_depth_m))
        throw ConfigError("seafloor_depth_m must exceed sonar_depth_m");
    if (sea_state < 0 || sea_state > 6) throw ConfigError("sea_state outside [0, 6]");
    if (shipping_level < 0.0 || shipping_level > 1.0)
        throw ConfigError("shipping_level outside [0, 1]");
    if (ph < 7.0 || ph > 9.0) throw ConfigError("ph outside [7, 9]");
}

int SonarParams::n_range_bins() const {
    return static_cast<int>(std::lround(max_range_m / range_resolution_m));
}

void SonarParams::validate() const {
    if (!(frequency_khz > 0.0)) throw ConfigError("frequency_khz must be positive");
    if (!(pulse_length_s > 0.0)) throw ConfigError("pulse_length_s must be positive");
    if (!(range_resolution_m > 0.0)) throw ConfigError("range_resolution_m must be positive");
    if (!(max_range_m > 0.0)) throw ConfigError("max_range_m must be positive");
    double bins = max_range_m / range_resolution_m;
    if (std::abs(bins - std::lround(bins)) > 1e-9)
        throw ConfigError("max_range_m must be an integer multiple of range_resolution_m");
    if (!(ping_interval_s > 0.0)) throw ConfigError("ping_interval_s must be positive");
}

void BeamSpec::validate() const {
    if (!(cutoff_low_deg < cutoff_high_deg))
        throw ConfigError("beam cutoff_low_deg must be below cutoff_high_deg");
    if (element_positions_wl.empty()) throw ConfigError("beam has no array elements");
}

BeamSpec make_line_array(double center_deg, double cutoff_low_deg, double cutoff_high_deg,
                         int n_elements, double spacing_wl) {
    if (n_elements < 1) throw ConfigError("line array needs at least one element");
    if (!(spacing_wl > 0.0)) throw ConfigError("element spacing must be positive");
    BeamSpec beam;
    beam.center_angle_deg = center_deg;
    beam.cutoff_low_deg = cutoff_low_deg;
    beam.cutoff_high_deg = cutoff_high_deg;
    beam.element_positions_wl.reserve(static_cast<size_t>(n_elements));
    double half = 0.5 * (n_elements - 1);
    for (int k = 0; k < n_elements; ++k) {
        // Elements lie across the beam axis (broadside array).
        beam.element_positions_wl.push_back({0.0, (k - half) * spacing_wl});
    }
    beam.validate();
    return beam;
}

double sound_speed(const EnvironmentParams& env) {
    env.validate();
    double t = env.temperature_c;
    double s = env.salinity_ppt;
    double z = env.sonar_depth_m;
    return 1449.2 + 4.6 * t - 0.055 * t * t + 0.00029 * t * t * t +
           (1.34 - 0.010 * t) * (s - 35.0) + 0.016 * z;
}

double absorption_coeff(double frequency_khz, const EnvironmentParams& env) {
    if (!(frequency_khz > 0.0)) throw DomainError("frequency must be positive");
    double t = env.temperature_c;
    double s = env.salinity_ppt;
    double z_km = env.sonar_depth_m / 1000.0;
    double f2 = frequency_khz * frequency_khz;

    double fb = 0.78 * std::sqrt(s / 35.0) * std::exp(t / 26.0);  // boric acid relax. (kHz)
    double fm = 42.0 * std::exp(t / 17.0);                        // MgSO4 relax. (kHz)

    double boric = 0.106 * (fb * f2 / (f2 + fb * fb)) * std::exp((env.ph - 8.0) / 0.56);
    double mgso4 = 0.52 * (1.0 + t / 43.0) * (s / 35.0) * (fm * f2 / (f2 + fm * fm)) *
                   std::exp(-z_km / 6.0);
    double water = 0.00049 * f2 * std::exp(-(t / 27.0 + z_km / 17.0));
    return boric + mgso4 + water;  // dB/km
}

double transmission_loss(double range_m, double frequency_khz, const EnvironmentParams& env) {
    if (!(range_m > 0.0)) throw DomainError("range must be positive");
    return 20.0 * std::log10(range_m) + absorption_coeff(frequency_khz, env) * range_m / 1000.0;
}

double beam_pattern_loss_offaxis(const BeamSpec& beam, double offaxis_deg) {
    double d = std::fmod(offaxis_deg, 360.0);
    if (d > 180.0) d -= 360.0;
    if (d < -180.0) d += 360.0;
    double rad = d * kDegToRad;
    double cs = std::cos(rad) - 1.0;
    double sn = std::sin(rad);
    std::complex<double> sum(0.0, 0.0);
    for (const auto& p : beam.element_positions_wl) {
        double phase = 2.0 * kPi * (p[0] * cs + p[1] * sn);
        sum += std::complex<double>(std::cos(phase), std::sin(phase));
    }
    double af = std::abs(sum) / static_cast<double>(beam.element_positions_wl.size());
    if (af <= 0.0) return kMaxPatternLossDb;
    double loss = -20.0 * std::log10(af);
    if (loss < 0.0) loss = 0.0;
    return std::min(loss, kMaxPatternLossDb);
}

double beam_pattern_loss(const BeamSpec& beam, double angle_deg) {
    return beam_pattern_loss_offaxis(beam, angle_deg - beam.center_angle_deg);
}

double sea_state_wind_speed_mps(int sea_state) {
    if (sea_state < 0 || sea_state > 6) throw DomainError("sea_state outside [0, 6]");
    return kSeaStateWindKn[sea_state] * kKnotToMps;
}

double ambient_noise_level(double frequency_khz, const EnvironmentParams& env) {
    if (!(frequency_khz > 0.0)) throw DomainError("frequency must be positive");
    double f = frequency_khz;
    double s = env.shipping_level;
    double w = sea_state_wind_speed_mps(env.sea_state);

    double turb_db = 17.0 - 30.0 * std::log10(f);
    double ship_db = 40.0 + 20.0 * (s - 0.5) + 26.0 * std::log10(f) - 60.0 * std::log10(f + 0.03);
    double wind_db = 50.0 + 7.5 * std::sqrt(w) + 20.0 * std::log10(f) - 40.0 * std::log10(f + 0.4);
    double thermal_db = -15.0 + 20.0 * std::log10(f);

    double total = db_to_power(turb_db) + db_to_power(ship_db) + db_to_power(wind_db) +
                   db_to_power(thermal_db);
    return power_to_db(total);
}

double backscatter_strength(ScatterKind kind, double grazing_deg, double frequency_khz,
                            const EnvironmentParams& env, double lambert_mu_db,
                            double volume_scattering_db) {
    switch (kind) {
        case ScatterKind::Volume:
            return volume_scattering_db;
        case ScatterKind::Seafloor: {
            if (!(grazing_deg > 0.0) || grazing_deg > 90.0)
                throw DomainError("grazing angle outside (0, 90]");
            return lambert_mu_db + 20.0 * std::log10(std::sin(grazing_deg * kDegToRad));
        }
        case ScatterKind::Surface: {
            if (!(grazing_deg > 0.0) || grazing_deg > 90.0)
                throw DomainError("grazing angle outside (0, 90]");
            if (env.sea_state < 0 || env.sea_state > 6)
                throw DomainError("sea_state outside [0, 6]");
            // Chapman-Harris is unbounded as wind speed -> 0; floor at 1 kn.
            double v_kn = std::max(1.0, kSeaStateWindKn[env.sea_state]);
            double f_hz = frequency_khz * 1000.0;
            double beta = 107.0 * std::pow(v_kn * std::cbrt(f_hz), -0.58);
            return 3.3 * beta * std::log10(grazing_deg / 30.0) - 42.4 * std::log10(beta) + 2.6;
        }
    }
    std::abort();
}

double echo_level(double target_strength_db, double range_m, double angle_deg,
                  const BeamSpec& beam, const SonarParams& sonar, const EnvironmentParams& env) {
    double tl = transmission_loss(range_m, sonar.frequency_khz, env);
    double bpl = beam_pattern_loss(beam, angle_deg);
    return sonar.source_level_db - 2.0 * tl + target_strength_db - 2.0 * bpl;
}

namespace {

// Linear power of one boundary's reverberation in a range bin, for SL = 0.
// h is the vertical offset to the boundary; the footprint is the annulus of
// ground ranges mapped from the bin's slant-range interval.
double boundary_reverb_power(ScatterKind kind, double h, double r_lo, double r_hi,
                             const BeamSpec& beam, const SonarParams& sonar,
                             const EnvironmentParams& env, double lambert_mu_db,
                             double volume_scattering_db) {
    if (r_hi <= h) return 0.0;
    double inner = std::max(r_lo, h);
    double rho_hi2 = r_hi * r_hi - h * h;
    double rho_lo2 = std::max(0.0, inner * inner - h * h);
    if (rho_hi2 <= rho_lo2) return 0.0;
    double phi_az = (beam.sector_width_deg()) * kDegToRad;
    double area = 0.5 * phi_az * (rho_hi2 - rho_lo2);
    double rho_mid = 0.5 * (std::sqrt(rho_lo2) + std::sqrt(rho_hi2));
    double r_eff = std::sqrt(h * h + rho_mid * rho_mid);
    double grazing_deg = std::atan2(h, rho_mid) / kDegToRad;
    double bs = backscatter_strength(kind, grazing_deg, sonar.frequency_khz, env, lambert_mu_db,
                                     volume_scattering_db);
    double bpl_vert = beam_pattern_loss_offaxis(beam, grazing_deg);
    double level = -2.0 * transmission_loss(r_eff, sonar.frequency_khz, env) + bs +
                   10.0 * std::log10(area) - 2.0 * bpl_vert;
    return db_to_power(level);
}

}  // namespace

std::vector<BinLevels> floor_profile(const BeamSpec& beam, const SonarParams& sonar,
                                     const EnvironmentParams& env, double lambert_mu_db,
                                     double volume_scattering_db) {
    beam.validate();
    sonar.validate();
    env.validate();
    int n = sonar.n_range_bins();
    double lc = sonar.range_resolution_m;
    double h_floor = env.height_above_seafloor();
    double h_surf = env.sonar_depth_m;
    double phi = beam.sector_width_deg() * kDegToRad;
    double noise_db = ambient_noise_level(sonar.frequency_khz, env) +
                      10.0 * std::log10(1.0 / sonar.pulse_length_s);
    double noise_lin = db_to_power(noise_db);

    std::vector<BinLevels> out(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        double r_lo = i * lc;
        double r_hi = (i + 1) * lc;
        double r = 0.5 * (r_lo + r_hi);

        // Volume: insonified shell, symmetric aperture in both planes.
        double vol = phi * phi * r * r * lc;
        double vol_lin = db_to_power(-2.0 * transmission_loss(r, sonar.frequency_khz, env) +
                                     volume_scattering_db + 10.0 * std::log10(vol));

        double reverb_lin = vol_lin;
        reverb_lin += boundary_reverb_power(ScatterKind::Seafloor, h_floor, r_lo, r_hi, beam,
                                            sonar, env, lambert_mu_db, volume_scattering_db);
        reverb_lin += boundary_reverb_power(ScatterKind::Surface, h_surf, r_lo, r_hi, beam, sonar,
                                            env, lambert_mu_db, volume_scattering_db);

        BinLevels bl;
        bl.reverb_db = sonar.source_level_db + power_to_db(reverb_lin);
        bl.noise_db = noise_db;
        bl.floor_db = power_to_db(db_to_power(sonar.source_level_db) * reverb_lin + noise_lin);
        out[static_cast<size_t>(i)] = bl;
    }
    return out;
}

double calibrate_source_level(const BeamSpec& forward_beam, const SonarParams& sonar,
                              const EnvironmentParams& env, double lambert_mu_db,
                              double volume_scattering_db, double calibration_ts_db,
                              double margin_db) {
    SonarParams unit = sonar;
    unit.source_level_db = 0.0;
    std::vector<BinLevels> profile =
        floor_profile(forward_beam, unit, env, lambert_mu_db, volume_scattering_db);
    const BinLevels& last = profile.back();
    double a = db_to_power(last.reverb_db);  // reverb power per unit source power
    double b = db_to_power(last.noise_db);
    double r_last = (sonar.n_range_bins() - 0.5) * sonar.range_resolution_m;
    double echo0 = -2.0 * transmission_loss(r_last, sonar.frequency_khz, env) + calibration_ts_db;

    double plateau = echo0 - power_to_db(a) - margin_db;
    if (plateau <= 0.0)
        throw ConfigError("source level calibration infeasible: reverberation-limited below margin");

    auto gap = [&](double sl) {
        return sl + echo0 - power_to_db(a * db_to_power(sl) + b) - margin_db;
    };
    double lo = -100.0;
    double hi = 400.0;
    if (gap(lo) > 0.0) return lo;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (gap(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-12) break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace flsim::acoustics
