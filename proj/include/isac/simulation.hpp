// SPDX-License-Identifier: Apache-2.0
//
// Frame synthesis and seeded Monte Carlo orchestration: one trial runs the
// full design chain, simulates a frame, and estimates the tracked target.
#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "isac/analog_combiner.hpp"
#include "isac/bs_precoder.hpp"
#include "isac/config.hpp"
#include "isac/sensing.hpp"

namespace isac {

/// Unit-energy QPSK symbols, rows x cols, scaled by sqrt(power).
CMatrix qpsk_symbols(Index rows, Index cols, double power, std::mt19937_64& rng);

/// Sample index of subcarrier m, symbol n in frame-ordered matrices.
inline Index frame_index(Index m, Index n, Index symbols) { return m * symbols + n; }

struct FrameInputs {
    const ScenarioRealization* scenario = nullptr;
    const HybridPrecoder* bs_precoder = nullptr;             // slots = user * M + m
    const std::vector<HybridPrecoder>* dl_combiners = nullptr;
    const std::vector<std::vector<CMatrix>>* precoded_ul = nullptr;  // [j][m]
    CMatrix analog_combiner;                                 // W at the BS receiver
    double dl_stream_power = 0.0;
    double ul_stream_power = 0.0;
    Index dl_streams = 1;
    Index ul_streams = 1;
};

struct Frame {
    CMatrix bs_samples;                 // N_RF x (M N), column frame_index(m, n)
    std::vector<CMatrix> dl_outputs;    // [i], N_s x (M N)
    std::vector<CMatrix> dl_symbols;    // [i], N_s x (M N)
    std::vector<CMatrix> ul_symbols;    // [j], N_s x (M N)
};

/// BS output W^H (sum_j G V s_j + sum_i H_T F d_i + sqrt(rho) H_SI sum_i F d_i + n)
/// and DL outputs U_i^H (H_i sum_i' F d_i' + n_i) for every (m, n).
Frame simulate_frame(const FrameInputs& in, std::mt19937_64& rng);

struct TrialResult {
    int trial = 0;
    std::uint64_t seed = 0;

    double dl_sum_se = 0.0;        // bits/s/Hz, mean over subcarriers, summed over users
    double ul_sum_se = 0.0;
    double fd_su_bound = 0.0;      // fully digital single-user bound, summed over DL users
    double mean_kappa1 = 0.0;

    double si_initial_db = 0.0;
    double si_final_db = 0.0;
    std::vector<CombinerTraceRow> si_trace;
    int accepted_steps = 0;
    int infeasible_steps = 0;
    double rx_radar_gain_min = 0.0;  // min over columns of |w^H a(theta_init)|

    bool radar = false;
    double angle_true = 0.0;         // rad
    double angle_initial = 0.0;
    double angle_refined = 0.0;
    double range_true = 0.0;         // m
    double range_est = 0.0;
    double range_bin = 0.0;
    double velocity_true = 0.0;      // m/s
    double velocity_est = 0.0;
    double velocity_bin = 0.0;
    double peak_to_second_peak = 0.0;
    Index masked = 0;

    AngleEstimate angle_estimate;    // filled only when keep_maps is set
    RangeDopplerMap range_doppler;   // filled only when keep_maps is set

    double angle_error_deg() const;
    double range_error_bins() const;
    double velocity_error_bins() const;
    bool si_trace_monotone() const;
};

struct TrialOptions {
    bool keep_maps = false;
    bool oracle_angle = false;  // radar processing at the true angle instead of the MUSIC estimate
};

/// Seed of one of a trial's independent random streams.
std::uint64_t trial_stream_seed(std::uint64_t master, int trial, int stream);

/// Full chain for one trial; deterministic in (config.seed, trial).
/// Module errors are rethrown as TrialFailure.
TrialResult run_trial(const SimConfig& config, int trial, const TrialOptions& opts = {});

/// Trials 0..n-1 over a worker pool; results ordered by trial.
std::vector<TrialResult> run_trials(const SimConfig& config, int n_trials, const TrialOptions& opts = {});

struct SweepPoint {
    std::string value;
    std::vector<TrialResult> trials;
};

/// One batch of config.trials per value of `axis`.
std::vector<SweepPoint> sweep(const SimConfig& config, const std::string& axis,
                              const std::vector<std::string>& values);

}  // namespace isac
