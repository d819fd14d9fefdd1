// SPDX-License-Identifier: Apache-2.0
//
// Spectral-efficiency and residual-SI figures of merit.
#pragma once

#include <vector>

#include "isac/bs_precoder.hpp"
#include "isac/channel.hpp"

namespace isac {

/// log2 det(I + p R^-1 S S^H) for Hermitian PD R.
double spectral_efficiency(const CMatrix& signal, const CMatrix& interference_cov, double stream_power);

/// DL user `user` at one subcarrier. `precoders` holds F_m^(i') for every DL
/// user; interference uses all i' != user, noise enters as noise * U^H U.
double dl_spectral_efficiency(const CMatrix& channel, const CMatrix& combiner,
                              const std::vector<CMatrix>& precoders, std::size_t user,
                              double stream_power, double noise);

/// Statistical covariance at the BS analog-combiner output of everything
/// except UL user `exclude` at subcarrier m: other UL users, target returns
/// averaged over the frame's symbols, residual SI, and noise.
struct BsCovarianceInputs {
    const ScenarioRealization* scenario = nullptr;
    CMatrix analog_combiner;                     // W
    const std::vector<CMatrix>* precoded_ul = nullptr;  // G_m^(j) V_m^(j) for each j at m
    const std::vector<CMatrix>* dl_precoders = nullptr; // F_m^(i) for each i at m
    double ul_stream_power = 0.0;
    double dl_stream_power = 0.0;
    Index m = 0;
};
CMatrix bs_interference_covariance(const BsCovarianceInputs& in, std::size_t exclude);

/// UL user j: signal W_BB^H (W^H G V), interference W_BB^H R W_BB.
double ul_spectral_efficiency(const CMatrix& digital_combiner, const CMatrix& effective_channel,
                              const CMatrix& interference_cov, double stream_power);

inline constexpr double kSiFloorDb = -200.0;

/// 10 log10(rho p (1/M) objective / (sigma^2 ||W||_F^2)), floored at -200 dB.
double residual_si_to_noise_db(double si_objective, double rho, double stream_power, Index subcarriers,
                               double noise, double combiner_norm_sq);

/// Same metric evaluated from matrices; `precoders` are the BS slots.
double residual_si_to_noise_db(const CMatrix& analog_combiner, const CMatrix& si_channel,
                               const std::vector<CMatrix>& precoders, double rho, double stream_power,
                               Index subcarriers, double noise);

/// Interference-free single-user capacity with n_streams eigenmodes, water
/// filling of total_power over the top singular values.
double fully_digital_su_bound(const CMatrix& channel, Index n_streams, double total_power, double noise);

/// Water-filling powers for channel gains g_k (= sigma_k^2 / noise).
std::vector<double> water_filling(const std::vector<double>& gains, double total_power);

}  // namespace isac
