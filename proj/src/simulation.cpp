// SPDX-License-Identifier: Apache-2.0
#include "isac/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "isac/digital_rx.hpp"
#include "isac/errors.hpp"
#include "isac/metrics.hpp"
#include "isac/ue_transceiver.hpp"

namespace isac {

namespace {

std::size_t sz(Index i) { return static_cast<std::size_t>(i); }

CVector complex_gaussian(Index n, double power, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, std::sqrt(power / 2.0));
    CVector v(n);
    for (Index k = 0; k < n; ++k) {
        const double re = g(rng);
        const double im = g(rng);
        v(k) = cd(re, im);
    }
    return v;
}

}  // namespace

CMatrix qpsk_symbols(Index rows, Index cols, double power, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> bit(0, 1);
    const double a = std::sqrt(power / 2.0);
    CMatrix d(rows, cols);
    for (Index c = 0; c < cols; ++c) {
        for (Index r = 0; r < rows; ++r) {
            const double re = bit(rng) ? a : -a;
            const double im = bit(rng) ? a : -a;
            d(r, c) = cd(re, im);
        }
    }
    return d;
}

Frame simulate_frame(const FrameInputs& in, std::mt19937_64& rng) {
    if (in.scenario == nullptr || in.bs_precoder == nullptr || in.dl_combiners == nullptr ||
        in.precoded_ul == nullptr)
        throw ContractViolation("simulate_frame: missing inputs");
    const ScenarioRealization& s = *in.scenario;
    const Index M = s.numerology.subcarriers;
    const Index N = s.numerology.symbols;
    const Index MN = M * N;
    const Index u_dl = static_cast<Index>(s.dl_channels.size());
    const Index u_ul = static_cast<Index>(in.precoded_ul->size());
    const CMatrix& w = in.analog_combiner;
    const Index nrf = w.cols();

    Frame fr;
    for (Index i = 0; i < u_dl; ++i) fr.dl_symbols.push_back(qpsk_symbols(in.dl_streams, MN, in.dl_stream_power, rng));
    for (Index j = 0; j < u_ul; ++j) fr.ul_symbols.push_back(qpsk_symbols(in.ul_streams, MN, in.ul_stream_power, rng));
    fr.bs_samples = CMatrix::Zero(nrf, MN);
    for (Index i = 0; i < u_dl; ++i) fr.dl_outputs.push_back(CMatrix::Zero(in.dl_streams, MN));

    const CMatrix w_si = std::sqrt(s.si_power_ratio) * (w.adjoint() * s.si_channel);
    std::vector<CVector> tgt_rx, tgt_tx;
    for (const auto& t : s.targets) {
        tgt_rx.push_back(w.adjoint() * array_response(s.n_bs_rx, t.angle));
        tgt_tx.push_back(array_response(s.n_bs_tx, t.angle));
    }

    std::vector<CMatrix> f(sz(u_dl)), ul_eff(sz(u_ul)), dl_comb(sz(u_dl));
    for (Index m = 0; m < M; ++m) {
        for (Index i = 0; i < u_dl; ++i) {
            f[sz(i)] = in.bs_precoder->full(bs_slot(i, m, M));
            dl_comb[sz(i)] = (*in.dl_combiners)[sz(i)].full(sz(m));
        }
        for (Index j = 0; j < u_ul; ++j) ul_eff[sz(j)] = w.adjoint() * (*in.precoded_ul)[sz(j)].at(sz(m));
        for (Index n = 0; n < N; ++n) {
            const Index col = frame_index(m, n, N);
            CVector x = CVector::Zero(s.n_bs_tx);
            for (Index i = 0; i < u_dl; ++i) x.noalias() += f[sz(i)] * fr.dl_symbols[sz(i)].col(col);

            CVector y = w_si * x;
            for (Index j = 0; j < u_ul; ++j) y.noalias() += ul_eff[sz(j)] * fr.ul_symbols[sz(j)].col(col);
            for (std::size_t k = 0; k < s.targets.size(); ++k) {
                const cd g = s.targets[k].gain * target_phase(s.targets[k], m, n, s.numerology) * tgt_tx[k].dot(x);
                y.noalias() += g * tgt_rx[k];
            }
            y.noalias() += w.adjoint() * complex_gaussian(s.n_bs_rx, s.noise_power, rng);
            fr.bs_samples.col(col) = y;

            for (Index i = 0; i < u_dl; ++i) {
                const CVector r = s.dl_channels[sz(i)][sz(m)] * x + complex_gaussian(s.n_ue, s.ue_noise_power, rng);
                fr.dl_outputs[sz(i)].col(col) = dl_comb[sz(i)].adjoint() * r;
            }
        }
    }
    return fr;
}

double TrialResult::angle_error_deg() const { return std::abs(rad_to_deg(angle_refined - angle_true)); }

double TrialResult::range_error_bins() const { return std::abs(range_est - range_true) / range_bin; }

double TrialResult::velocity_error_bins() const { return std::abs(velocity_est - velocity_true) / velocity_bin; }

bool TrialResult::si_trace_monotone() const {
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& row : si_trace) {
        if (!row.accepted) continue;
        if (row.objective > prev) return false;
        prev = row.objective;
    }
    return true;
}

std::uint64_t trial_stream_seed(std::uint64_t master, int trial, int stream) {
    const std::uint64_t base = master + static_cast<std::uint64_t>(trial);
    std::seed_seq seq{static_cast<std::uint32_t>(base & 0xffffffffu), static_cast<std::uint32_t>(base >> 32),
                      static_cast<std::uint32_t>(stream)};
    std::uint32_t out[2];
    seq.generate(out, out + 2);
    return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

namespace {

TrialResult run_trial_impl(const SimConfig& cfg, int trial, const TrialOptions& opts) {
    TrialResult res;
    res.trial = trial;
    res.seed = cfg.seed;

    const ScenarioRealization s = draw_scenario(cfg, trial_stream_seed(cfg.seed, trial, 1));
    std::mt19937_64 design_rng(trial_stream_seed(cfg.seed, trial, 2));
    std::mt19937_64 frame_rng(trial_stream_seed(cfg.seed, trial, 3));
    const Index M = s.numerology.subcarriers;
    const FactorizationOptions fopts{cfg.factorization_max_iters, cfg.factorization_tol};

    // UE transceivers.
    std::vector<HybridPrecoder> dl_comb;
    for (const auto& h : s.dl_channels) dl_comb.push_back(dl_combiner(h, cfg.n_dl_streams, cfg.n_ue_rf, fopts));
    std::vector<std::vector<CMatrix>> precoded_ul;
    for (const auto& g : s.ul_channels) {
        const HybridPrecoder v = ul_precoder(g, cfg.n_ul_streams, cfg.n_ue_rf, fopts);
        std::vector<CMatrix> per_m;
        per_m.reserve(sz(M));
        for (Index m = 0; m < M; ++m) per_m.push_back(g[sz(m)] * v.full(sz(m)));
        precoded_ul.push_back(std::move(per_m));
    }

    // Initial analog combiner, then BS precoders against it.
    const CMatrix w_com = comm_eigen_directions(precoded_ul, cfg.n_ul_streams, cfg.n_bs_rf, design_rng);
    const InitialCombiner init = initial_combiner(w_com, s.initial_angle, cfg.kappa2);

    BsPrecoderInputs pin;
    pin.scenario = &s;
    pin.dl_combiners = &dl_comb;
    pin.analog_combiner = init.w;
    pin.stream_power = cfg.dl_stream_power();
    pin.design_angle = s.initial_angle;
    pin.tau_t = cfg.tau_t();
    pin.n_streams = cfg.n_dl_streams;
    pin.n_rf = cfg.n_bs_rf;
    pin.include_si = cfg.si_aware_precoder;
    pin.factorization = fopts;
    const BsPrecoderDesign bs = design_bs_precoders(pin);
    double k_sum = 0.0;
    for (double k : bs.kappa1) k_sum += k;
    res.mean_kappa1 = k_sum / static_cast<double>(bs.kappa1.size());

    std::vector<CMatrix> all_f;
    all_f.reserve(bs.precoder.digital.size());
    for (std::size_t slot = 0; slot < bs.precoder.digital.size(); ++slot) all_f.push_back(bs.precoder.full(slot));

    // Analog combiner BCD.
    CombinerDesignConfig ccfg;
    ccfg.tau_r = cfg.tau_r();
    ccfg.tau_com = cfg.tau_com();
    ccfg.eps1 = cfg.eps1;
    ccfg.eps2 = cfg.eps2;
    ccfg.kappa2 = cfg.kappa2;
    ccfg.block_fraction = cfg.block_fraction;
    ccfg.max_iters = cfg.max_iters;
    ccfg.convergence_tol = cfg.convergence_tol;
    const SiMetricScale scale{s.si_power_ratio, cfg.dl_stream_power(), M, s.noise_power};
    const CMatrix q = si_quadratic(s.si_channel, all_f);
    AnalogCombinerDesign comb = design_analog_combiner(init, q, s.initial_angle, ccfg, scale, design_rng);
    const CMatrix& w = comb.w;
    res.si_trace = std::move(comb.trace);
    res.si_initial_db = res.si_trace.front().residual_si_to_noise_db;
    res.si_final_db = res.si_trace.back().residual_si_to_noise_db;
    res.accepted_steps = comb.accepted_steps;
    res.infeasible_steps = comb.infeasible_steps;
    res.rx_radar_gain_min = std::numeric_limits<double>::infinity();
    for (Index r = 0; r < w.cols(); ++r)
        res.rx_radar_gain_min = std::min(res.rx_radar_gain_min, rx_radar_gain(w.col(r), s.initial_angle));

    const TargetParams& tgt = s.targets.front();
    res.angle_true = tgt.angle;
    res.angle_initial = s.initial_angle;
    res.angle_refined = s.initial_angle;
    res.range_true = tgt.range;
    res.velocity_true = tgt.velocity;

    // Frame simulation and angle refinement.
    Frame frame;
    if (cfg.simulate_radar) {
        FrameInputs fin;
        fin.scenario = &s;
        fin.bs_precoder = &bs.precoder;
        fin.dl_combiners = &dl_comb;
        fin.precoded_ul = &precoded_ul;
        fin.analog_combiner = w;
        fin.dl_stream_power = cfg.dl_stream_power();
        fin.ul_stream_power = cfg.ul_stream_power();
        fin.dl_streams = cfg.n_dl_streams;
        fin.ul_streams = cfg.n_ul_streams;
        frame = simulate_frame(fin, frame_rng);

        const CMatrix r_ul_free = ul_free_covariance(sample_covariance(frame.bs_samples), w, precoded_ul,
                                                     cfg.ul_stream_power());
        AngleEstimate est = beamspace_music(whiten(r_ul_free, w), w, s.initial_angle,
                                            deg_to_rad(cfg.music_window_deg), deg_to_rad(cfg.music_step_deg));
        res.angle_refined = est.refined_angle;
        if (opts.keep_maps) res.angle_estimate = std::move(est);
    }

    // Digital combiners: LMMSE per UL user, MVDR toward the refined angle.
    const double radar_angle = opts.oracle_angle ? tgt.angle : res.angle_refined;
    const DigitalCombiners dig = design_digital_combiners(w, precoded_ul, M, cfg.ul_stream_power(), s.noise_power,
                                                          radar_angle);

    // Spectral efficiencies.
    const Index u_dl = static_cast<Index>(s.dl_channels.size());
    const Index u_ul = static_cast<Index>(precoded_ul.size());
    std::vector<CMatrix> f_m(sz(u_dl)), gv_m(sz(u_ul));
    double dl = 0.0, ul = 0.0, bound = 0.0;
    for (Index m = 0; m < M; ++m) {
        for (Index i = 0; i < u_dl; ++i) f_m[sz(i)] = bs.precoder.full(bs_slot(i, m, M));
        for (Index j = 0; j < u_ul; ++j) gv_m[sz(j)] = precoded_ul[sz(j)][sz(m)];
        for (Index i = 0; i < u_dl; ++i) {
            const CMatrix& h = s.dl_channels[sz(i)][sz(m)];
            dl += dl_spectral_efficiency(h, dl_comb[sz(i)].full(sz(m)), f_m, sz(i), cfg.dl_stream_power(),
                                         s.ue_noise_power);
            bound += fully_digital_su_bound(h, cfg.n_dl_streams,
                                            static_cast<double>(cfg.n_dl_streams) * cfg.dl_stream_power(),
                                            s.ue_noise_power);
        }
        BsCovarianceInputs cin;
        cin.scenario = &s;
        cin.analog_combiner = w;
        cin.precoded_ul = &gv_m;
        cin.dl_precoders = &f_m;
        cin.ul_stream_power = cfg.ul_stream_power();
        cin.dl_stream_power = cfg.dl_stream_power();
        cin.m = m;
        for (Index j = 0; j < u_ul; ++j) {
            const CMatrix r = bs_interference_covariance(cin, sz(j));
            ul += ul_spectral_efficiency(dig.lmmse[sz(j)][sz(m)], w.adjoint() * gv_m[sz(j)], r, cfg.ul_stream_power());
        }
    }
    res.dl_sum_se = dl / static_cast<double>(M);
    res.ul_sum_se = ul / static_cast<double>(M);
    res.fd_su_bound = bound / static_cast<double>(M);

    // Radar image and range-Doppler estimation.
    if (cfg.simulate_radar) {
        const Index N = s.numerology.symbols;
        CMatrix y_rad(M, N), scalars(M, N);
        std::vector<CVector> d(sz(u_dl));
        for (Index m = 0; m < M; ++m) {
            for (Index i = 0; i < u_dl; ++i) f_m[sz(i)] = bs.precoder.full(bs_slot(i, m, M));
            const CVector& mv = dig.mvdr[sz(m)];
            for (Index n = 0; n < N; ++n) {
                const Index col = frame_index(m, n, N);
                for (Index i = 0; i < u_dl; ++i) d[sz(i)] = frame.dl_symbols[sz(i)].col(col);
                y_rad(m, n) = mv.dot(frame.bs_samples.col(col));
                scalars(m, n) = radar_scalar(radar_angle, mv, w, f_m, d);
            }
        }
        const RadarImage img = radar_image(y_rad, scalars);
        const Index os = cfg.oversampling;
        RangeVelocityEstimate rv = range_velocity_estimate(img.z, s.numerology, os * M, os * N);
        res.radar = true;
        res.masked = img.masked;
        res.range_est = rv.range;
        res.velocity_est = rv.velocity;
        res.range_bin = rv.map.range_bin;
        res.velocity_bin = rv.map.velocity_bin;
        res.peak_to_second_peak = peak_to_second_peak_ratio(rv.map, os);
        if (opts.keep_maps) res.range_doppler = std::move(rv.map);
    }
    return res;
}

}  // namespace

TrialResult run_trial(const SimConfig& config, int trial, const TrialOptions& opts) {
    config.validate();
    try {
        return run_trial_impl(config, trial, opts);
    } catch (const TrialFailure&) {
        throw;
    } catch (const Error& e) {
        throw TrialFailure(e, trial);
    }
}

std::vector<TrialResult> run_trials(const SimConfig& config, int n_trials, const TrialOptions& opts) {
    if (n_trials < 0) throw ContractViolation("run_trials: negative trial count");
    std::vector<TrialResult> out(static_cast<std::size_t>(n_trials));
    unsigned workers = config.threads > 0 ? static_cast<unsigned>(config.threads) : std::thread::hardware_concurrency();
    workers = std::max(1u, std::min(workers, static_cast<unsigned>(std::max(n_trials, 1))));

    std::atomic<int> next{0};
    std::mutex err_mu;
    std::exception_ptr first_error;
    int first_error_trial = n_trials;
    auto work = [&]() {
        for (int t = next++; t < n_trials; t = next++) {
            try {
                out[static_cast<std::size_t>(t)] = run_trial(config, t, opts);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(err_mu);
                if (t < first_error_trial) {
                    first_error_trial = t;
                    first_error = std::current_exception();
                }
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned k = 0; k < workers; ++k) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    return out;
}

std::vector<SweepPoint> sweep(const SimConfig& config, const std::string& axis, const std::vector<std::string>& values) {
    std::vector<SweepPoint> out;
    for (const auto& v : values) {
        const SimConfig c = with_field(config, axis, v);
        c.validate();
        out.push_back({v, run_trials(c, c.trials)});
    }
    return out;
}

}  // namespace isac
