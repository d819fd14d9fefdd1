// SPDX-License-Identifier: Apache-2.0
#include "isac/report.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "isac/errors.hpp"
#include "isac/metrics.hpp"

namespace isac {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path);
    if (!os) throw ContractViolation("cannot open " + path.string() + " for writing");
    os << std::setprecision(10);
    return os;
}

double db20(double x) { return x > 0.0 ? 20.0 * std::log10(x) : kSiFloorDb; }
double db10(double x) { return x > 0.0 ? 10.0 * std::log10(x) : kSiFloorDb; }

}  // namespace

Aggregate aggregate(const std::vector<TrialResult>& results) {
    Aggregate a;
    a.trials = static_cast<int>(results.size());
    if (results.empty()) return a;
    int radar = 0;
    for (const auto& r : results) {
        a.dl_sum_se += r.dl_sum_se;
        a.ul_sum_se += r.ul_sum_se;
        a.fd_su_bound += r.fd_su_bound;
        a.si_initial_db += r.si_initial_db;
        a.si_final_db += r.si_final_db;
        if (r.si_initial_db - r.si_final_db >= 40.0) a.si_drop_ge_40db_fraction += 1.0;
        if (r.radar) {
            ++radar;
            if (r.angle_error_deg() <= 0.2) a.angle_ok_fraction += 1.0;
            if (r.range_error_bins() <= 1.0) a.range_ok_fraction += 1.0;
            if (r.velocity_error_bins() <= 1.0) a.velocity_ok_fraction += 1.0;
        }
    }
    const double n = static_cast<double>(results.size());
    a.dl_sum_se /= n;
    a.ul_sum_se /= n;
    a.fd_su_bound /= n;
    a.si_initial_db /= n;
    a.si_final_db /= n;
    a.si_drop_ge_40db_fraction /= n;
    if (radar > 0) {
        a.angle_ok_fraction /= radar;
        a.range_ok_fraction /= radar;
        a.velocity_ok_fraction /= radar;
    }
    return a;
}

std::string trial_csv_header() {
    return "trial,dl_sum_se,ul_sum_se,fd_su_bound,mean_kappa1,si_initial_db,si_final_db,accepted_steps,"
           "infeasible_steps,rx_radar_gain_min,angle_true_deg,angle_initial_deg,angle_refined_deg,"
           "angle_error_deg,range_true_m,range_est_m,range_bin_m,velocity_true_mps,velocity_est_mps,"
           "velocity_bin_mps,peak_to_second_peak_db,masked";
}

std::string trial_csv_row(const TrialResult& r) {
    std::ostringstream os;
    os << std::setprecision(10) << r.trial << ',' << r.dl_sum_se << ',' << r.ul_sum_se << ',' << r.fd_su_bound << ','
       << r.mean_kappa1 << ',' << r.si_initial_db << ',' << r.si_final_db << ',' << r.accepted_steps << ','
       << r.infeasible_steps << ',' << r.rx_radar_gain_min << ',' << rad_to_deg(r.angle_true) << ','
       << rad_to_deg(r.angle_initial) << ',' << rad_to_deg(r.angle_refined) << ',' << r.angle_error_deg() << ','
       << r.range_true << ',' << r.range_est << ',' << r.range_bin << ',' << r.velocity_true << ','
       << r.velocity_est << ',' << r.velocity_bin << ',' << db20(r.peak_to_second_peak) << ',' << r.masked;
    return os.str();
}

void write_config_snapshot(const std::filesystem::path& path, const SimConfig& config) {
    auto os = open_out(path);
    os << to_json(config) << '\n';
}

void write_trials_csv(const std::filesystem::path& path, const std::vector<TrialResult>& results) {
    auto os = open_out(path);
    os << trial_csv_header() << '\n';
    for (const auto& r : results) os << trial_csv_row(r) << '\n';
}

void write_aggregate_csv(const std::filesystem::path& path, const std::vector<TrialResult>& results) {
    const Aggregate a = aggregate(results);
    auto os = open_out(path);
    os << "trials,dl_sum_se,ul_sum_se,fd_su_bound,si_initial_db,si_final_db,si_drop_ge_40db_fraction,"
          "angle_ok_fraction,range_ok_fraction,velocity_ok_fraction\n";
    os << a.trials << ',' << a.dl_sum_se << ',' << a.ul_sum_se << ',' << a.fd_su_bound << ',' << a.si_initial_db
       << ',' << a.si_final_db << ',' << a.si_drop_ge_40db_fraction << ',' << a.angle_ok_fraction << ','
       << a.range_ok_fraction << ',' << a.velocity_ok_fraction << '\n';
}

void write_trace_csv(const std::filesystem::path& path, const std::vector<TrialResult>& results) {
    auto os = open_out(path);
    os << "trial,iteration,objective,residual_si_to_noise_db,accepted,infeasible\n";
    for (const auto& r : results)
        for (const auto& row : r.si_trace)
            os << r.trial << ',' << row.iteration << ',' << row.objective << ',' << row.residual_si_to_noise_db << ','
               << int(row.accepted) << ',' << int(row.infeasible) << '\n';
}

void write_sweep_csv(const std::filesystem::path& path, const std::string& axis, const std::vector<SweepPoint>& points) {
    auto os = open_out(path);
    os << axis << ',' << trial_csv_header() << '\n';
    for (const auto& p : points)
        for (const auto& r : p.trials) os << p.value << ',' << trial_csv_row(r) << '\n';
}

void write_range_doppler_csv(const std::filesystem::path& path, const RangeDopplerMap& map) {
    auto os = open_out(path);
    os << "# range_bin_m=" << map.range_bin << " velocity_bin_mps=" << map.velocity_bin
       << " peak_range_index=" << map.peak_range_index << " peak_doppler_index=" << map.peak_doppler_index
       << " rows=" << map.image.rows() << " cols=" << map.image.cols() << '\n';
    os << "range_index,doppler_index,magnitude_db\n";
    for (Index mt = 0; mt < map.image.rows(); ++mt)
        for (Index nt = 0; nt < map.image.cols(); ++nt)
            os << mt << ',' << nt << ',' << db20(std::abs(map.image(mt, nt))) << '\n';
}

void write_pseudospectrum_csv(const std::filesystem::path& path, const AngleEstimate& est) {
    auto os = open_out(path);
    os << "angle_deg,power_db\n";
    for (std::size_t k = 0; k < est.grid.size(); ++k)
        os << rad_to_deg(est.grid[k]) << ',' << db10(est.pseudospectrum[k]) << '\n';
}

}  // namespace isac
