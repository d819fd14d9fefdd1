// SPDX-License-Identifier: Apache-2.0
//
// CSV and snapshot writers for run directories.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "isac/config.hpp"
#include "isac/simulation.hpp"

namespace isac {

struct Aggregate {
    int trials = 0;
    double dl_sum_se = 0.0;
    double ul_sum_se = 0.0;
    double fd_su_bound = 0.0;
    double si_initial_db = 0.0;
    double si_final_db = 0.0;
    double si_drop_ge_40db_fraction = 0.0;
    double angle_ok_fraction = 0.0;     // refined error <= 0.2 deg
    double range_ok_fraction = 0.0;     // error <= 1 range bin
    double velocity_ok_fraction = 0.0;  // error <= 1 velocity bin
};

Aggregate aggregate(const std::vector<TrialResult>& results);

std::string trial_csv_header();
std::string trial_csv_row(const TrialResult& r);

void write_config_snapshot(const std::filesystem::path& path, const SimConfig& config);
void write_trials_csv(const std::filesystem::path& path, const std::vector<TrialResult>& results);
void write_aggregate_csv(const std::filesystem::path& path, const std::vector<TrialResult>& results);
/// One row per (trial, BCD iteration).
void write_trace_csv(const std::filesystem::path& path, const std::vector<TrialResult>& results);
/// Columns (axis value, trial, metrics...).
void write_sweep_csv(const std::filesystem::path& path, const std::string& axis, const std::vector<SweepPoint>& points);
/// |map| in dB with a commented metadata header.
void write_range_doppler_csv(const std::filesystem::path& path, const RangeDopplerMap& map);
/// (angle_deg, power_db) rows.
void write_pseudospectrum_csv(const std::filesystem::path& path, const AngleEstimate& est);

}  // namespace isac
