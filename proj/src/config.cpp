// SPDX-License-Identifier: Apache-2.0
#include "isac/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "isac/errors.hpp"

namespace isac {

using nlohmann::json;

namespace {

#define ISAC_CONFIG_FIELDS(X)                                                                  \
    X(n_bs_tx) X(n_bs_rx) X(n_ue) X(n_bs_rf) X(n_ue_rf) X(u_dl) X(u_ul) X(n_dl_streams)        \
    X(n_ul_streams) X(p_dl_dbm) X(p_ul_dbm) X(noise_dbm) X(ue_noise_dbm) X(si_to_noise_db)     \
    X(subcarriers) X(symbols) X(subcarrier_spacing_hz) X(symbol_duration_s) X(carrier_hz)      \
    X(tau_t_frac) X(tau_r_frac) X(tau_com_frac) X(eps1) X(eps2) X(kappa2) X(block_fraction)    \
    X(max_iters) X(convergence_tol) X(si_aware_precoder) X(factorization_max_iters)            \
    X(factorization_tol) X(targets) X(rcs) X(target_angle_min_deg) X(target_angle_max_deg)     \
    X(target_range_min_m) X(target_range_max_m) X(target_speed_min_mps)                        \
    X(target_speed_max_mps) X(ue_distance_m) X(ue_angle_min_deg) X(ue_angle_max_deg)           \
    X(ue_paths) X(nlos_rel_min_db) X(nlos_rel_max_db) X(nlos_excess_delay_max_s)               \
    X(initial_angle_error_deg) X(si_separation_wavelengths) X(simulate_radar) X(oversampling)  \
    X(music_window_deg) X(music_step_deg) X(trials) X(seed) X(threads)

json to_json_object(const SimConfig& c) {
    json j;
#define X(name) j[#name] = c.name;
    ISAC_CONFIG_FIELDS(X)
#undef X
    return j;
}

SimConfig overlay(const json& j, const SimConfig& base) {
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    SimConfig c = base;
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        try {
#define X(name)                                              \
    if (it.key() == #name) {                                 \
        c.name = it.value().get<decltype(SimConfig::name)>(); \
        known = true;                                        \
    }
            ISAC_CONFIG_FIELDS(X)
#undef X
        } catch (const json::exception& e) {
            throw ConfigError("config: bad value for '" + it.key() + "': " + e.what());
        }
        if (!known) throw ConfigError("config: unknown key '" + it.key() + "'");
    }
    c.validate();
    return c;
}

}  // namespace

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double deg_to_rad(double deg) { return deg * kPi / 180.0; }
double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

double SimConfig::p_dl() const { return dbm_to_watts(p_dl_dbm); }
double SimConfig::p_ul() const { return dbm_to_watts(p_ul_dbm); }
double SimConfig::noise_power() const { return dbm_to_watts(noise_dbm); }
double SimConfig::ue_noise_power() const { return dbm_to_watts(ue_noise_dbm); }
double SimConfig::si_power_ratio() const { return db_to_linear(si_to_noise_db) * noise_power(); }
double SimConfig::dl_stream_power() const { return p_dl() / (u_dl * n_dl_streams); }
double SimConfig::ul_stream_power() const { return p_ul() / n_ul_streams; }
double SimConfig::tau_t() const { return tau_t_frac * std::sqrt(static_cast<double>(n_bs_tx)); }
double SimConfig::tau_r() const { return tau_r_frac * n_bs_rx; }
double SimConfig::tau_com() const { return tau_com_frac * n_bs_rx; }

OfdmNumerology SimConfig::numerology() const {
    OfdmNumerology num;
    num.subcarriers = subcarriers;
    num.symbols = symbols;
    num.subcarrier_spacing = subcarrier_spacing_hz;
    num.cp_duration = symbol_duration_s - 1.0 / subcarrier_spacing_hz;
    num.carrier = carrier_hz;
    return num;
}

void SimConfig::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw ConfigError(std::string("config: ") + what);
    };
    require(n_bs_tx > 0 && n_bs_rx > 0 && n_ue > 0, "array sizes must be positive");
    require(n_bs_rf > 0 && n_ue_rf > 0, "RF chain counts must be positive");
    require(u_dl > 0 && u_ul > 0, "user counts must be positive");
    require(n_dl_streams > 0 && n_ul_streams > 0, "stream counts must be positive");
    require(n_dl_streams <= n_bs_rf && n_dl_streams <= n_ue_rf, "DL streams exceed RF chains");
    require(n_ul_streams <= n_ue_rf, "UL streams exceed UE RF chains");
    require(n_ue_rf <= n_ue && n_bs_rf <= n_bs_tx && n_bs_rf <= n_bs_rx, "more RF chains than antennas");
    require(subcarriers > 0 && symbols > 0, "numerology counts must be positive");
    require(subcarrier_spacing_hz > 0 && carrier_hz > 0, "frequencies must be positive");
    require(symbol_duration_s >= 1.0 / subcarrier_spacing_hz, "symbol shorter than 1/spacing");
    require(tau_t_frac >= 0 && tau_t_frac <= 1, "tau_t_frac outside [0, 1]");
    require(tau_r_frac >= 0 && tau_r_frac <= 1, "tau_r_frac outside [0, 1]");
    require(tau_com_frac >= 0 && tau_com_frac <= 1, "tau_com_frac outside [0, 1]");
    require(eps1 > 0 && eps2 > 0, "eps1 and eps2 must be positive");
    require(kappa2 >= 0 && kappa2 <= 1, "kappa2 outside [0, 1]");
    require(block_fraction > 0 && block_fraction <= 1, "block_fraction outside (0, 1]");
    require(max_iters >= 0 && convergence_tol >= 0, "iteration controls out of range");
    require(factorization_max_iters > 0, "factorization_max_iters must be positive");
    require(targets > 0 && rcs >= 0, "need at least one target");
    require(target_range_min_m > 0 && target_range_min_m <= target_range_max_m, "bad range interval");
    require(target_angle_min_deg <= target_angle_max_deg, "bad target angle interval");
    require(target_speed_min_mps <= target_speed_max_mps, "bad speed interval");
    require(ue_distance_m > 0 && ue_paths > 0, "bad UE geometry");
    require(nlos_rel_min_db <= nlos_rel_max_db, "bad NLoS level interval");
    require(nlos_excess_delay_max_s >= 0, "negative excess delay");
    require(initial_angle_error_deg >= 0, "negative angle error");
    require(si_separation_wavelengths > 0, "SI separation must be positive");
    require(oversampling >= 1, "oversampling must be >= 1");
    require(music_window_deg > 0 && music_step_deg > 0, "MUSIC grid must be positive");
    require(trials > 0 && threads >= 0, "trial/thread counts out of range");
}

SimConfig desk_profile() { return SimConfig{}; }

SimConfig paper_profile() {
    SimConfig c;
    c.subcarriers = 792;
    c.trials = 100;
    return c;
}

SimConfig profile_by_name(const std::string& name) {
    if (name == "desk") return desk_profile();
    if (name == "paper") return paper_profile();
    throw ConfigError("config: unknown profile '" + name + "'");
}

std::string to_json(const SimConfig& config) { return to_json_object(config).dump(2); }

SimConfig from_json(const std::string& json_text, const SimConfig& base) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: parse error: ") + e.what());
    }
    return overlay(j, base);
}

SimConfig load_config(const std::string& path, const SimConfig& base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str(), base);
}

SimConfig with_field(const SimConfig& config, const std::string& key, const std::string& value) {
    json base = to_json_object(config);
    if (!base.contains(key)) throw ConfigError("config: unknown key '" + key + "'");
    json patch;
    try {
        json parsed = json::parse(value);
        if (base[key].is_number_integer() && parsed.is_number_float()) {
            const double v = parsed.get<double>();
            if (v != std::floor(v)) throw ConfigError("config: '" + key + "' expects an integer");
            parsed = static_cast<long long>(v);
        }
        patch[key] = parsed;
    } catch (const json::exception&) {
        throw ConfigError("config: cannot parse value '" + value + "' for '" + key + "'");
    }
    return overlay(patch, config);
}

}  // namespace isac
