// SPDX-License-Identifier: Apache-2.0
//
// Target parameter estimation at the FD BS: UL-free, whitened beamspace
// MUSIC angle refinement and OFDM-radar range/velocity estimation.
#pragma once

#include <vector>

#include "isac/channel.hpp"
#include "isac/numerics.hpp"

namespace isac {

/// (1/K) sum_k y_k y_k^H over the columns of `samples`.
CMatrix sample_covariance(const CMatrix& samples);

/// Subtracts (1/M) sum_m sum_j p W^H G V V^H G^H W from `sample_cov`.
/// precoded_ul[j][m] = G_m^(j) V_m^(j).
CMatrix ul_free_covariance(const CMatrix& sample_cov, const CMatrix& analog_combiner,
                           const std::vector<std::vector<CMatrix>>& precoded_ul, double stream_power);

struct Whitened {
    CMatrix covariance;  // L^-1 R L^-H
    CMatrix lower;       // L with L L^H = W^H W
};

Whitened whiten(const CMatrix& covariance, const CMatrix& analog_combiner);

struct AngleEstimate {
    double refined_angle = 0.0;
    std::vector<double> grid;            // rad
    std::vector<double> pseudospectrum;  // linear
    double window = 0.0;                 // rad, half width
};

/// MUSIC over [initial - window, initial + window] in steps of `step`:
/// P(theta) = ||b||^2 / ||E_n^H b||^2 with b = L^-1 W^H a(theta). Ties resolve
/// to the smallest angle. Throws NoPeakError when all eigenvalues coincide.
AngleEstimate beamspace_music(const Whitened& whitened, const CMatrix& analog_combiner, double initial_angle,
                              double window, double step, Index n_sources = 1);

/// c_{m,n}(theta) = w_m^H W^H a_R(theta) * sum_i a_T^H(theta) F_m^(i) d_{m,n}^(i).
/// `precoders[i]` is F_m^(i), `symbols[i]` is d_{m,n}^(i).
cd radar_scalar(double angle, const CVector& mvdr, const CMatrix& analog_combiner,
                const std::vector<CMatrix>& precoders, const std::vector<CVector>& symbols);

struct RadarImage {
    CMatrix z;        // M x N
    Index masked = 0; // entries with |c| below threshold, set to zero
};

inline constexpr double kRadarScalarFloor = 1e-12;

/// Z = conj(c) / |c|^2 * y_rad, entrywise over M x N.
RadarImage radar_image(const CMatrix& radar_samples, const CMatrix& radar_scalars);

struct RangeDopplerMap {
    CMatrix image;               // M~ x N~
    double range_bin = 0.0;      // c / (2 M~ df), m
    double velocity_bin = 0.0;   // lambda / (N~ Ts), m/s
    Index peak_range_index = 0;
    Index peak_doppler_index = 0;
};

struct RangeVelocityEstimate {
    double range = 0.0;
    double velocity = 0.0;
    RangeDopplerMap map;
};

/// Velocity for a Doppler bin under the one-way convention v = n lambda / (N~ Ts).
double doppler_bin_velocity(double doppler_index, Index doppler_len, double wavelength, double symbol_duration);

/// Peak search over |transform(Z)| (ties: smallest range index, then
/// smallest Doppler index). Range = m~ c / (2 M~ df). Doppler indices above
/// N~/2 wrap to negative; velocity is half the one-way value because the
/// channel's Doppler is the two-way 2 v / lambda.
RangeVelocityEstimate range_velocity_estimate(const CMatrix& z, const OfdmNumerology& num, Index range_len,
                                              Index doppler_len);

/// Largest |image| outside the peak's main-lobe cross (cells within
/// `guard` bins of the peak row or column, circularly), over |peak|.
double peak_to_second_peak_ratio(const RangeDopplerMap& map, Index guard);

}  // namespace isac
