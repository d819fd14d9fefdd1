// SPDX-License-Identifier: Apache-2.0
//
// Simulation configuration. Fields use boundary units (dBm, dB, degrees,
// fractions of array gains); the accessors below convert to the linear SI
// units used internally.
#pragma once

#include <cstdint>
#include <string>

#include "isac/channel.hpp"

namespace isac {

struct SimConfig {
    // Arrays and RF chains.
    int n_bs_tx = 64;
    int n_bs_rx = 64;
    int n_ue = 16;
    int n_bs_rf = 4;
    int n_ue_rf = 2;
    int u_dl = 2;
    int u_ul = 2;
    int n_dl_streams = 2;
    int n_ul_streams = 2;

    // Powers.
    double p_dl_dbm = 20.0;
    double p_ul_dbm = 10.0;
    double noise_dbm = -93.8;
    double ue_noise_dbm = -93.8;
    double si_to_noise_db = 80.0;

    // OFDM numerology.
    int subcarriers = 64;
    int symbols = 14;
    double subcarrier_spacing_hz = 120e3;
    double symbol_duration_s = 8.92e-6;
    double carrier_hz = 28e9;

    // Thresholds: tau_T in units of sqrt(N_BS,T); tau_R, tau_com in units of N_BS,R.
    double tau_t_frac = 0.25;
    double tau_r_frac = 0.4;
    double tau_com_frac = 0.5;

    // Analog combiner design.
    double eps1 = 0.3;
    double eps2 = 0.1;
    double kappa2 = 0.5;
    double block_fraction = 0.25;
    int max_iters = 200;
    double convergence_tol = 1e-5;

    // Precoder options. si_aware_precoder = false drops the SI leakage term.
    bool si_aware_precoder = true;
    int factorization_max_iters = 50;
    double factorization_tol = 1e-4;

    // Scenario draw.
    int targets = 4;
    double rcs = 10.0;
    double target_angle_min_deg = -60.0;
    double target_angle_max_deg = 60.0;
    double target_range_min_m = 20.0;
    double target_range_max_m = 60.0;
    double target_speed_min_mps = 10.0;
    double target_speed_max_mps = 30.0;
    double ue_distance_m = 50.0;
    double ue_angle_min_deg = -60.0;
    double ue_angle_max_deg = 60.0;
    int ue_paths = 5;
    double nlos_rel_min_db = 5.0;
    double nlos_rel_max_db = 15.0;
    double nlos_excess_delay_max_s = 100e-9;
    double initial_angle_error_deg = 1.0;
    double si_separation_wavelengths = 6.0;

    // Sensing.
    bool simulate_radar = true;
    int oversampling = 4;
    double music_window_deg = 3.0;
    double music_step_deg = 0.02;

    // Monte Carlo.
    int trials = 20;
    std::uint64_t seed = 1;
    int threads = 0;  // 0 = hardware concurrency

    // Linear-unit views.
    double p_dl() const;             // W
    double p_ul() const;             // W
    double noise_power() const;      // W
    double ue_noise_power() const;   // W
    double si_power_ratio() const;   // rho = 10^(SI/N dB / 10) * sigma^2
    double dl_stream_power() const;  // P_DL / (U_DL N_DL,s)
    double ul_stream_power() const;  // P_UL / N_UL,s
    double tau_t() const;
    double tau_r() const;
    double tau_com() const;
    OfdmNumerology numerology() const;

    /// Throws ConfigError on any out-of-range field.
    void validate() const;
};

SimConfig desk_profile();
SimConfig paper_profile();
SimConfig profile_by_name(const std::string& name);

std::string to_json(const SimConfig& config);
/// Overlays the keys present in `json_text` onto `base`; unknown keys are a
/// ConfigError.
SimConfig from_json(const std::string& json_text, const SimConfig& base = desk_profile());
SimConfig load_config(const std::string& path, const SimConfig& base = desk_profile());

/// Sets one field by name from its textual value (used by sweeps).
SimConfig with_field(const SimConfig& config, const std::string& key, const std::string& value);

double dbm_to_watts(double dbm);
double db_to_linear(double db);
double deg_to_rad(double deg);
double rad_to_deg(double rad);

}  // namespace isac
