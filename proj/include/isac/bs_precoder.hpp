// SPDX-License-Identifier: Apache-2.0
//
// FD base-station transmit side: SI-aware SLNR precoders for communication
// and sensing, their kappa_1 trade-off, and the greedy hybrid factorization
// into one frequency-flat analog matrix plus per-(m, i) digital matrices.
#pragma once

#include <vector>

#include "isac/channel.hpp"
#include "isac/numerics.hpp"

namespace isac {

/// One frequency-flat unit-modulus analog matrix shared by all "slots"
/// (subcarrier/user pairs) plus one digital matrix per slot. Also used for
/// UE-side combiners and precoders.
struct HybridPrecoder {
    CMatrix analog;                    // N x N_RF
    std::vector<CMatrix> digital;      // per slot, N_RF x N_s
    std::vector<double> error_trace;   // factorization squared error per iteration

    CMatrix full(std::size_t slot) const { return analog * digital.at(slot); }
};

/// BS precoders are stored user-major: slot = user * M + m.
inline std::size_t bs_slot(Index user, Index m, Index subcarriers) {
    return static_cast<std::size_t>(user * subcarriers + m);
}

struct LeakageMatrices {
    CMatrix own;    // B-bar for this user
    CMatrix cross;  // sum of B-bar over the other users
    CMatrix si;     // C-bar
    double noise = 0.0;

    /// cross + si + noise * I
    CMatrix denominator() const;
};

/// C-bar = p * rho * H_SI^H W W^H H_SI. An empty W yields zero.
CMatrix si_leakage(const CMatrix& si_channel, const CMatrix& analog_combiner, double stream_power,
                   double rho);

/// Leakage matrices of every DL user at one subcarrier. `channels[i]` is
/// H_m^(i), `combiners[i]` the full hybrid combiner of user i at m.
std::vector<LeakageMatrices> leakage_matrices(const std::vector<CMatrix>& channels,
                                              const std::vector<CMatrix>& combiners,
                                              const CMatrix& si_leak, double stream_power,
                                              double noise);

/// Ratio trace(F^H A F) / trace(F^H D F).
double slnr(const CMatrix& f, const CMatrix& numerator, const CMatrix& denominator);

/// Top-n generalized eigenvectors of (own, denominator), unit-norm columns.
CMatrix comm_precoder_slnr(const LeakageMatrices& leak, Index n_streams);

/// D^-1 a(theta) / ||D^-1 a(theta)|| replicated across n_streams columns.
CMatrix sensing_precoder_slnr(const LeakageMatrices& leak, double angle, Index n_streams);

struct CombinedPrecoder {
    CMatrix f;
    double kappa1 = 1.0;
};

/// Largest kappa_1 on {1.00, 0.99, ..., 0} such that every column of the
/// Frobenius-normalized kappa_1 F_com + (1 - kappa_1) F_rad has TX radar gain
/// >= tau_t at `angle`. Each F_rad column is first rotated so its response at
/// `angle` is in phase with the matching F_com column. Throws InfeasibleError
/// naming the first failing stream when even kappa_1 = 0 fails.
CombinedPrecoder combine_precoders(const CMatrix& f_com, const CMatrix& f_rad, double angle,
                                   double tau_t);

struct FactorizationOptions {
    int max_iters = 50;
    double tol = 1e-4;
};

/// Alternating least-squares / phase-projection factorization of the
/// per-slot targets onto a common analog matrix with n_rf columns. Each slot
/// is rescaled at the end so ||F_RF F_BB||_F^2 equals its column count.
HybridPrecoder hybrid_factorize(const std::vector<CMatrix>& targets, Index n_rf,
                                const FactorizationOptions& opts = {});

struct BsPrecoderDesign {
    HybridPrecoder precoder;
    std::vector<CMatrix> fully_digital;  // per slot, before factorization
    std::vector<double> kappa1;          // per slot
};

struct BsPrecoderInputs {
    const ScenarioRealization* scenario = nullptr;
    const std::vector<HybridPrecoder>* dl_combiners = nullptr;  // per DL user, slots = m
    CMatrix analog_combiner;                                     // W used in C-bar
    double stream_power = 0.0;
    double design_angle = 0.0;
    double tau_t = 0.0;
    Index n_streams = 1;
    Index n_rf = 1;
    bool include_si = true;
    FactorizationOptions factorization;
};

BsPrecoderDesign design_bs_precoders(const BsPrecoderInputs& in);

}  // namespace isac
