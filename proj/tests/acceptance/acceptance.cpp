// SPDX-License-Identifier: Apache-2.0
//
// Acceptance run: one PASS/FAIL line per criterion plus INFO lines with the
// measured quantities. Exit status is nonzero when any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "isac/analog_combiner.hpp"
#include "isac/bs_precoder.hpp"
#include "isac/channel.hpp"
#include "isac/config.hpp"
#include "isac/digital_rx.hpp"
#include "isac/numerics.hpp"
#include "isac/report.hpp"
#include "isac/simulation.hpp"

using namespace isac;

namespace {

int g_failures = 0;

void verdict(const std::string& id, bool pass, const std::string& detail) {
    std::printf("[%s] %s: %s\n", pass ? "PASS" : "FAIL", id.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

void info(const std::string& id, const std::string& detail) {
    std::printf("[INFO] %s: %s\n", id.c_str(), detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double mean_of(const std::vector<TrialResult>& rs, const std::function<double(const TrialResult&)>& f) {
    double acc = 0.0;
    for (const auto& r : rs) acc += f(r);
    return rs.empty() ? 0.0 : acc / static_cast<double>(rs.size());
}

double fraction(const std::vector<TrialResult>& rs, const std::function<bool(const TrialResult&)>& f) {
    int n = 0;
    for (const auto& r : rs) n += f(r) ? 1 : 0;
    return rs.empty() ? 0.0 : static_cast<double>(n) / static_cast<double>(rs.size());
}

CMatrix gaussian(Index rows, Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    CMatrix a(rows, cols);
    for (Index c = 0; c < cols; ++c)
        for (Index r = 0; r < rows; ++r) {
            const double re = g(rng);
            const double im = g(rng);
            a(r, c) = cd(re, im);
        }
    return a;
}

CMatrix phases(Index rows, Index cols, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-kPi, kPi);
    CMatrix a(rows, cols);
    for (Index c = 0; c < cols; ++c)
        for (Index r = 0; r < rows; ++r) a(r, c) = std::polar(1.0, u(rng));
    return a;
}

SimConfig base_config() {
    SimConfig c = desk_profile();
    c.trials = 20;
    c.seed = 1;
    return c;
}

// Criteria 1 and 2 share the sensing-on runs.
void criteria_one_two() {
    SimConfig sensing = base_config();
    sensing.simulate_radar = false;
    const auto t0 = std::chrono::steady_clock::now();
    const auto on = run_trials(sensing, sensing.trials);
    const double elapsed = seconds_since(t0);

    const double monotone = fraction(on, [](const TrialResult& r) { return r.si_trace_monotone(); });
    const double drop = fraction(on, [](const TrialResult& r) { return r.si_final_db <= r.si_initial_db - 40.0; });
    info("C1", "mean initial SI-to-noise " + fmt("%.1f dB", mean_of(on, [](const TrialResult& r) { return r.si_initial_db; })) +
                   ", mean final " + fmt("%.1f dB", mean_of(on, [](const TrialResult& r) { return r.si_final_db; })) +
                   ", runtime " + fmt("%.1f s", elapsed));
    verdict("C1 SI suppression",
            monotone == 1.0 && drop >= 0.9 && elapsed <= 600.0,
            "monotone traces " + fmt("%.0f%%", 100 * monotone) + ", >=40 dB drop in " + fmt("%.0f%%", 100 * drop) +
                " of 20 trials (need 100% and >=90%), " + fmt("%.1f s", elapsed) + " (need <=600 s)");

    SimConfig plain = sensing;
    plain.tau_t_frac = 0.0;
    plain.tau_r_frac = 0.0;
    plain.tau_com_frac = 0.7;
    plain.kappa2 = 1.0;
    const auto off = run_trials(plain, plain.trials);
    const double bound = mean_of(on, [](const TrialResult& r) { return r.fd_su_bound; });
    const double se_off = mean_of(off, [](const TrialResult& r) { return r.dl_sum_se; });
    const double se_on = mean_of(on, [](const TrialResult& r) { return r.dl_sum_se; });
    verdict("C2a benchmark ordering", bound >= se_off && se_off >= se_on,
            "fully digital SU bound " + fmt("%.2f", bound) + " >= no sensing " + fmt("%.2f", se_off) +
                " >= sensing " + fmt("%.2f", se_on) + " bits/s/Hz");

    std::vector<double> by_rf;
    by_rf.push_back(se_on);
    for (int rf : {6, 8}) {
        SimConfig c = sensing;
        c.n_bs_rf = rf;
        by_rf.push_back(mean_of(run_trials(c, c.trials), [](const TrialResult& r) { return r.dl_sum_se; }));
    }
    verdict("C2b RF-chain trend", by_rf[1] >= by_rf[0] && by_rf[2] >= by_rf[1],
            "DL sum SE at N_RF = 4/6/8: " + fmt("%.2f", by_rf[0]) + " / " + fmt("%.2f", by_rf[1]) + " / " +
                fmt("%.2f", by_rf[2]));

    std::string sat = "mean DL sum SE at P_DL = ";
    for (double p : {0.0, 10.0, 20.0, 30.0, 40.0}) {
        SimConfig c = sensing;
        c.p_dl_dbm = p;
        c.trials = 5;
        sat += fmt("%.0f dBm: ", p) + fmt("%.2f; ", mean_of(run_trials(c, c.trials), [](const TrialResult& r) { return r.dl_sum_se; }));
    }
    info("C2c saturation", sat);
}

void report_radar(const std::string& id, const std::vector<TrialResult>& rs, bool check_velocity, bool verdict_line,
                  bool with_angle = true) {
    const double angle = fraction(rs, [](const TrialResult& r) { return r.angle_error_deg() <= 0.2; });
    const double range = fraction(rs, [](const TrialResult& r) { return r.range_error_bins() <= 1.0; });
    const double vel = fraction(rs, [](const TrialResult& r) { return r.velocity_error_bins() <= 1.0; });
    const std::string detail = (with_angle ? "angle <=0.2 deg in " + fmt("%.0f%%", 100 * angle) + ", " : std::string()) +
                               "range <=1 bin in " + fmt("%.0f%%", 100 * range) + ", velocity <=1 bin in " +
                               fmt("%.0f%%", 100 * vel) + " of " + std::to_string(rs.size()) + " trials";
    if (!verdict_line) {
        info(id, detail);
        return;
    }
    const bool pass = angle >= 0.9 && range >= 0.9 && (!check_velocity || vel >= 0.9);
    verdict(id, pass, detail + (check_velocity ? " (need >=90% each)" : " (need >=90% angle and range)"));
}

void criterion_three() {
    SimConfig c = base_config();
    c.simulate_radar = true;
    const auto n14 = run_trials(c, c.trials);
    report_radar("C3a radar accuracy N=14", n14, false, true);

    SimConfig c56 = c;
    c56.symbols = 56;
    const auto n56 = run_trials(c56, c56.trials);
    report_radar("C3b radar accuracy N=56", n56, true, true);

    SimConfig quiet = c;
    quiet.p_ul_dbm = -200.0;
    report_radar("C3 no-UL reference N=14", run_trials(quiet, quiet.trials), false, false);

    TrialOptions oracle;
    oracle.oracle_angle = true;
    report_radar("C3 true-angle MVDR reference N=14", run_trials(c, c.trials, oracle), false, false, false);
}

void criterion_four() {
    std::mt19937_64 rng(2024);

    int slnr_beaten = 0;
    for (int inst = 0; inst < 50; ++inst) {
        const CMatrix h = gaussian(4, 16, rng), g = gaussian(4, 16, rng), hsi = gaussian(8, 16, rng);
        const CMatrix u = gaussian(4, 1, rng), w = phases(8, 2, rng);
        const auto leak = leakage_matrices({h, g}, {u, u}, si_leakage(hsi, w, 0.5, 0.1), 1.0, 0.2);
        const CMatrix f = comm_precoder_slnr(leak[0], 1);
        const CMatrix d = leak[0].denominator();
        const double best = slnr(f, leak[0].own, d);
        for (int s = 0; s < 1000; ++s)
            if (slnr(gaussian(16, 1, rng), leak[0].own, d) > best * (1 + 1e-12)) ++slnr_beaten;
    }
    verdict("C4a SLNR oracle", slnr_beaten == 0,
            std::to_string(slnr_beaten) + " of 50000 random precoders beat the generalized eigenvector");

    int mvdr_beaten = 0;
    for (int inst = 0; inst < 50; ++inst) {
        const CMatrix w = phases(32, 4, rng);
        const CMatrix r = ul_interference_covariance(w, {gaussian(32, 2, rng), gaussian(32, 2, rng)}, 2.0, 0.1);
        const CovarianceFactor fac(r);
        const double angle = 0.8 * (gaussian(1, 1, rng)(0).real() / 3.0);
        const CVector v = mvdr_combiner(fac, w, angle);
        const CVector b = w.adjoint() * array_response(32, angle);
        const double best = v.dot(r * v).real();
        for (int s = 0; s < 1000; ++s) {
            CVector x = gaussian(4, 1, rng);
            x /= std::conj(x.dot(b));
            if (x.dot(r * x).real() < best * (1 - 1e-12)) ++mvdr_beaten;
        }
    }
    verdict("C4b MVDR oracle", mvdr_beaten == 0,
            std::to_string(mvdr_beaten) + " of 50000 constrained random combiners beat MVDR");

    double worst = 0.0;
    for (int inst = 0; inst < 50; ++inst) {
        const CMatrix w = phases(16, 4, rng);
        const std::vector<CMatrix> gv{gaussian(16, 2, rng), gaussian(16, 2, rng)};
        const CMatrix r = ul_interference_covariance(w, gv, 1.0, 0.5);
        const CMatrix wbb = lmmse_combiner(CovarianceFactor(r), w, gv[0]);
        const CMatrix h = w.adjoint() * gv[0];
        auto mse = [&](const CVector& x, Index s) { return x.dot(r * x).real() - 2.0 * x.dot(h.col(s)).real() + 1.0; };
        auto grad = [&](const CVector& x, Index s) {
            const double e = 1e-6;
            double acc = 0.0;
            for (Index k = 0; k < x.size(); ++k)
                for (cd d : {cd(e, 0.0), cd(0.0, e)}) {
                    CVector p = x, m = x;
                    p(k) += d;
                    m(k) -= d;
                    const double g = (mse(p, s) - mse(m, s)) / (2 * e);
                    acc += g * g;
                }
            return std::sqrt(acc);
        };
        for (Index s = 0; s < 2; ++s)
            worst = std::max(worst, grad(wbb.col(s), s) / grad(gaussian(4, 1, rng), s));
    }
    verdict("C4c LMMSE stationarity", worst < 1e-5, "worst relative gradient norm " + fmt("%.2e", worst) + " (need <1e-5)");

    const CMatrix x = gaussian(32, 32, rng);
    CMatrix naive = CMatrix::Zero(32, 32);
    for (Index mt = 0; mt < 32; ++mt)
        for (Index nt = 0; nt < 32; ++nt)
            for (Index m = 0; m < 32; ++m)
                for (Index n = 0; n < 32; ++n)
                    naive(mt, nt) += x(m, n) * std::polar(1.0, 2.0 * kPi * double(m * mt) / 32.0) *
                                     std::polar(1.0, -2.0 * kPi * double(n * nt) / 32.0);
    const double rel = (range_doppler_transform(x, 32, 32) - naive).norm() / naive.norm();
    verdict("C4d transform oracle", rel <= 1e-9, "relative error " + fmt("%.2e", rel) + " on 32x32 (need <=1e-9)");
}

void criterion_five() {
    std::mt19937_64 rng(77);
    double modulus = 0.0, power = 0.0, distortion = 0.0, frob = 0.0;
    int non_monotone = 0;
    std::uniform_int_distribution<int> size(4, 24);
    for (int k = 0; k < 100; ++k) {
        const Index n = size(rng), nr = size(rng);
        const Index nrf = std::min<Index>(4, std::min(n, nr));
        std::vector<CMatrix> targets;
        for (int s = 0; s < 6; ++s) targets.push_back(gaussian(n, 1, rng));
        const HybridPrecoder hp = hybrid_factorize(targets, nrf);
        modulus = std::max(modulus, (hp.analog.cwiseAbs().array() - 1.0).abs().maxCoeff());
        for (std::size_t s = 1; s < hp.error_trace.size(); ++s)
            if (hp.error_trace[s] > hp.error_trace[s - 1] * (1 + 1e-12)) ++non_monotone;
        for (std::size_t s = 0; s < targets.size(); ++s) power = std::max(power, std::abs(hp.full(s).squaredNorm() - 1.0));

        const double angle = 0.5 * gaussian(1, 1, rng)(0).real();
        const auto comb = combine_precoders(gaussian(n, 2, rng), array_response(n, angle).replicate(1, 2), angle,
                                            0.25 * std::sqrt(double(n)));
        power = std::max(power, std::abs(comb.f.squaredNorm() - 2.0) / 2.0);

        const auto init = initial_combiner(gaussian(nr, nrf, rng), angle, 0.5);
        modulus = std::max(modulus, (init.w.cwiseAbs().array() - 1.0).abs().maxCoeff());
        const CovarianceFactor fac(ul_interference_covariance(init.w, {gaussian(nr, 1, rng)}, 1.0, 0.3));
        const CVector v = mvdr_combiner(fac, init.w, angle);
        distortion = std::max(distortion, std::abs(v.dot(init.w.adjoint() * array_response(nr, angle)) - 1.0));

        const double lambda = 0.01;
        const CMatrix hsi = si_channel(ula_positions(n, lambda / 2, 0.0), ula_positions(nr, lambda / 2, (2 + k % 7) * lambda), lambda);
        frob = std::max(frob, std::abs(hsi.squaredNorm() / double(n * nr) - 1.0));
    }
    verdict("C5 invariants", modulus <= 1e-9 && power <= 1e-6 && distortion <= 1e-9 && frob <= 1e-9 && non_monotone == 0,
            "100 cases: unit modulus " + fmt("%.1e", modulus) + ", power " + fmt("%.1e", power) + ", distortionless " +
                fmt("%.1e", distortion) + ", SI Frobenius " + fmt("%.1e", frob) + ", non-monotone traces " +
                std::to_string(non_monotone));
}

// Seed pairs (M = 64 vs M = 256) whose peak-to-second-peak ratio increases.
int psr_increases(const SimConfig& c, const TrialOptions& opts, std::string& pairs) {
    SimConfig wide = c;
    wide.subcarriers = 256;
    const auto narrow_runs = run_trials(c, c.trials, opts);
    const auto wide_runs = run_trials(wide, wide.trials, opts);
    int up = 0;
    for (std::size_t k = 0; k < narrow_runs.size(); ++k) {
        const double a = narrow_runs[k].peak_to_second_peak, b = wide_runs[k].peak_to_second_peak;
        if (b > a) ++up;
        pairs += fmt("%.2f", a) + "->" + fmt("%.2f", b) + (k + 1 < narrow_runs.size() ? ", " : "");
    }
    return up;
}

void criterion_six() {
    SimConfig c = base_config();
    c.simulate_radar = true;
    c.trials = 10;
    std::string pairs;
    const int up = psr_increases(c, {}, pairs);
    info("C6", "peak-to-second-peak M=64 -> M=256: " + pairs);
    verdict("C6 UL-interference decay", up == 10, std::to_string(up) + "/10 seed pairs increase (need 10/10)");

    TrialOptions oracle;
    oracle.oracle_angle = true;
    std::string oracle_pairs;
    const int oracle_up = psr_increases(c, oracle, oracle_pairs);
    info("C6 true-angle MVDR reference", std::to_string(oracle_up) + "/10 increase: " + oracle_pairs);
}

}  // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    try {
        criterion_four();
        criterion_five();
        criteria_one_two();
        criterion_three();
        criterion_six();
    } catch (const std::exception& e) {
        std::printf("[FAIL] acceptance aborted: %s\n", e.what());
        return 2;
    }
    info("total", fmt("%.1f s", seconds_since(t0)));
    std::printf("%d criterion line(s) failed\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
