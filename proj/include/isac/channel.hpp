// SPDX-License-Identifier: Apache-2.0
//
// Geometric mmWave channel generators for the FD base station: sparse
// multipath UE links, the monostatic target channel, and the near-field
// LoS self-interference channel between collocated TX and RX ULAs.
#pragma once

#include <cstdint>
#include <vector>

#include "isac/numerics.hpp"

namespace isac {

struct SimConfig;

inline constexpr double kSpeedOfLight = 3e8;

struct PathParams {
    cd gain{0.0, 0.0};
    double delay = 0.0;  // s
    double aoa = 0.0;    // rad, receive side
    double aod = 0.0;    // rad, transmit side
};

struct TargetParams {
    cd gain{0.0, 0.0};
    double doppler = 0.0;           // Hz, f_D = 2 v / lambda
    double round_trip_delay = 0.0;  // s
    double angle = 0.0;             // rad
    double range = 0.0;             // m
    double velocity = 0.0;          // m/s, positive = approaching
    double rcs = 0.0;               // m^2
};

struct OfdmNumerology {
    Index subcarriers = 64;
    Index symbols = 14;
    double subcarrier_spacing = 120e3;  // Hz
    double cp_duration = 8.92e-6 - 1.0 / 120e3;
    double carrier = 28e9;

    double symbol_duration() const { return 1.0 / subcarrier_spacing + cp_duration; }
    double wavelength() const { return kSpeedOfLight / carrier; }
};

struct ScenarioRealization {
    OfdmNumerology numerology;
    Index n_bs_tx = 0;
    Index n_bs_rx = 0;
    Index n_ue = 0;

    std::vector<std::vector<PathParams>> dl_paths;  // [user]
    std::vector<std::vector<PathParams>> ul_paths;  // [user]
    std::vector<std::vector<CMatrix>> dl_channels;  // [user][m], N_UE x N_BS,T
    std::vector<std::vector<CMatrix>> ul_channels;  // [user][m], N_BS,R x N_UE

    std::vector<TargetParams> targets;  // targets[0] is tracked this frame
    double initial_angle = 0.0;         // erroneous prior estimate of targets[0].angle

    CMatrix si_channel;
    double si_power_ratio = 0.0;  // rho, linear
    double noise_power = 0.0;     // BS receiver, W
    double ue_noise_power = 0.0;  // DL UE receiver, W
};

/// ULA steering vector with half-wavelength spacing; entry k is
/// exp(-j pi k sin(angle)), k = 0..n-1.
CVector array_response(Index n_antennas, double angle);

CMatrix dl_channel(const std::vector<PathParams>& paths, Index m, const OfdmNumerology& num,
                   Index n_ue, Index n_bs_tx);
CMatrix ul_channel(const std::vector<PathParams>& paths, Index m, const OfdmNumerology& num,
                   Index n_bs_rx, Index n_ue);

/// Complex phase of target k at subcarrier m, symbol n (without beta).
cd target_phase(const TargetParams& t, Index m, Index n, const OfdmNumerology& num);

CMatrix target_channel(const std::vector<TargetParams>& targets, Index m, Index n,
                       const OfdmNumerology& num, Index n_bs_rx, Index n_bs_tx);

/// Radar-range equation, lambda^2 rcs / ((4 pi)^3 d^4).
double radar_gain_power(double wavelength, double rcs, double range);

/// Element positions of an x-axis ULA, spacing in metres, offset along z.
std::vector<Eigen::Vector3d> ula_positions(Index n, double spacing, double z_offset);

/// Near-field LoS channel, entry (p, q) = gamma / d_pq * exp(-j 2 pi d_pq / lambda),
/// scaled so that ||H||_F^2 = N_T N_R.
CMatrix si_channel(const std::vector<Eigen::Vector3d>& tx_positions,
                   const std::vector<Eigen::Vector3d>& rx_positions, double wavelength);

double tx_radar_gain(const CVector& precoder_column, double angle);
double rx_radar_gain(const CVector& combiner_column, double angle);

/// One Monte Carlo draw of every random quantity in the scenario. Parameter
/// draws do not depend on the subcarrier count, so two configs differing
/// only in M see the same geometry for the same seed.
ScenarioRealization draw_scenario(const SimConfig& config, std::uint64_t seed);

}  // namespace isac
