// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "isac/config.hpp"
#include "isac/errors.hpp"
#include "isac/simulation.hpp"
#include "isac/ue_transceiver.hpp"
#include "test_util.hpp"

using namespace isac;
using isac::test::random_matrix;
using isac::test::random_unit_modulus;

namespace {

SimConfig tiny_config() {
    SimConfig c = desk_profile();
    c.n_bs_tx = 16;
    c.n_bs_rx = 16;
    c.n_ue = 8;
    c.subcarriers = 16;
    c.symbols = 4;
    c.max_iters = 20;
    c.trials = 2;
    c.seed = 5;
    return c;
}

// Frame plumbing with one DL user, one UL user and random transceivers.
struct FrameFixture {
    ScenarioRealization s;
    HybridPrecoder bs;
    std::vector<HybridPrecoder> dl_comb;
    std::vector<std::vector<CMatrix>> precoded_ul;
    CMatrix w;

    FrameFixture(Index m_count, Index n_count, std::uint64_t seed) {
        SimConfig c = desk_profile();
        c.n_bs_tx = 8;
        c.n_bs_rx = 16;
        c.n_ue = 4;
        c.u_dl = 1;
        c.u_ul = 1;
        c.subcarriers = static_cast<int>(m_count);
        c.symbols = static_cast<int>(n_count);
        s = draw_scenario(c, seed);
        std::mt19937_64 rng(seed);
        bs.analog = random_unit_modulus(8, 4, rng);
        dl_comb.resize(1);
        dl_comb[0].analog = random_unit_modulus(4, 2, rng);
        precoded_ul.resize(1);
        for (Index m = 0; m < m_count; ++m) {
            bs.digital.push_back(random_matrix(4, 2, rng) * 0.1);
            dl_comb[0].digital.push_back(random_matrix(2, 2, rng));
            precoded_ul[0].push_back(random_matrix(16, 2, rng) * 1e-3);
        }
        w = random_unit_modulus(16, 4, rng);
    }

    FrameInputs inputs(double p_dl, double p_ul) const {
        FrameInputs in;
        in.scenario = &s;
        in.bs_precoder = &bs;
        in.dl_combiners = &dl_comb;
        in.precoded_ul = &precoded_ul;
        in.analog_combiner = w;
        in.dl_stream_power = p_dl;
        in.ul_stream_power = p_ul;
        in.dl_streams = 2;
        in.ul_streams = 2;
        return in;
    }
};

}  // namespace

TEST(Qpsk, ConstellationAndMoments) {
    std::mt19937_64 rng(1);
    const double p = 0.25;
    const CMatrix d = qpsk_symbols(2, 10000, p, rng);
    for (Index k = 0; k < d.size(); ++k) {
        EXPECT_NEAR(std::norm(d(k)), p, 1e-15);
        EXPECT_NEAR(std::abs(std::abs(d(k).real()) - std::abs(d(k).imag())), 0.0, 1e-15);
    }
    const CMatrix cov = d * d.adjoint() / 10000.0;
    EXPECT_LT((cov - p * CMatrix::Identity(2, 2)).norm() / (p * std::sqrt(2.0)), 0.05);
}

TEST(FrameIndex, RowMajorOverSymbols) {
    EXPECT_EQ(frame_index(0, 0, 14), 0);
    EXPECT_EQ(frame_index(2, 3, 14), 31);
}

TEST(SimulateFrame, ZeroPowersGiveCombinedNoise) {
    FrameFixture fx(1000, 10, 2);
    fx.s.si_power_ratio = 0.0;
    for (auto& t : fx.s.targets) t.gain = 0.0;
    std::mt19937_64 rng(3);
    const Frame fr = simulate_frame(fx.inputs(0.0, 0.0), rng);
    ASSERT_EQ(fr.bs_samples.cols(), 10000);
    const CMatrix r = sample_covariance(fr.bs_samples);
    const CMatrix expected = fx.s.noise_power * fx.w.adjoint() * fx.w;
    EXPECT_LT((r - expected).norm() / expected.norm(), 0.1);
}

TEST(SimulateFrame, NoiselessDownlinkEqualsChain) {
    FrameFixture fx(4, 3, 4);
    fx.s.ue_noise_power = 0.0;
    std::mt19937_64 rng(5);
    const Frame fr = simulate_frame(fx.inputs(0.5, 0.0), rng);
    for (Index m = 0; m < 4; ++m)
        for (Index n = 0; n < 3; ++n) {
            const Index col = frame_index(m, n, 3);
            const CVector expected = fx.dl_comb[0].full(m).adjoint() * fx.s.dl_channels[0][m] * fx.bs.full(m) *
                                     fr.dl_symbols[0].col(col);
            EXPECT_LT((fr.dl_outputs[0].col(col) - expected).norm(), 1e-12 * std::max(1.0, expected.norm()));
        }
}

TEST(SimulateFrame, NoiselessBaseStationEqualsChain) {
    FrameFixture fx(3, 2, 6);
    fx.s.noise_power = 0.0;
    std::mt19937_64 rng(7);
    const Frame fr = simulate_frame(fx.inputs(0.5, 0.1), rng);
    const double root_rho = std::sqrt(fx.s.si_power_ratio);
    for (Index m = 0; m < 3; ++m)
        for (Index n = 0; n < 2; ++n) {
            const Index col = frame_index(m, n, 2);
            const CVector x = fx.bs.full(m) * fr.dl_symbols[0].col(col);
            CVector y = fx.precoded_ul[0][m] * fr.ul_symbols[0].col(col) + root_rho * fx.s.si_channel * x;
            y += target_channel(fx.s.targets, m, n, fx.s.numerology, 16, 8) * x;
            const CVector expected = fx.w.adjoint() * y;
            EXPECT_LT((fr.bs_samples.col(col) - expected).norm(), 1e-9 * expected.norm());
        }
}

TEST(TrialSeeds, StreamsAreDistinctAndStable) {
    std::set<std::uint64_t> seen;
    for (int t = 0; t < 10; ++t)
        for (int s = 1; s <= 3; ++s) seen.insert(trial_stream_seed(1, t, s));
    EXPECT_EQ(seen.size(), 30u);
    EXPECT_EQ(trial_stream_seed(9, 2, 1), trial_stream_seed(9, 2, 1));
}

TEST(RunTrial, DeterministicAndWellFormed) {
    const SimConfig c = tiny_config();
    const TrialResult a = run_trial(c, 1);
    const TrialResult b = run_trial(c, 1);
    EXPECT_EQ(a.dl_sum_se, b.dl_sum_se);
    EXPECT_EQ(a.ul_sum_se, b.ul_sum_se);
    EXPECT_EQ(a.si_final_db, b.si_final_db);
    EXPECT_EQ(a.angle_refined, b.angle_refined);
    EXPECT_EQ(a.range_est, b.range_est);
    EXPECT_EQ(a.velocity_est, b.velocity_est);
    ASSERT_EQ(a.si_trace.size(), b.si_trace.size());

    EXPECT_TRUE(a.radar);
    EXPECT_TRUE(a.si_trace_monotone());
    EXPECT_LE(a.si_final_db, a.si_initial_db);
    EXPECT_GE(a.dl_sum_se, 0.0);
    EXPECT_GE(a.ul_sum_se, 0.0);
    EXPECT_GE(a.fd_su_bound, a.dl_sum_se);
    EXPECT_EQ(a.masked, 0);
    EXPECT_LE(std::abs(a.angle_refined - a.angle_initial), deg_to_rad(c.music_window_deg) + 1e-12);
    EXPECT_GT(a.range_bin, 0.0);
    EXPECT_TRUE(a.angle_estimate.grid.empty());

    const TrialResult other = run_trial(c, 0);
    EXPECT_NE(other.angle_true, a.angle_true);
}

TEST(RunTrial, KeepMapsStoresEstimates) {
    TrialOptions opts;
    opts.keep_maps = true;
    const TrialResult r = run_trial(tiny_config(), 0, opts);
    EXPECT_FALSE(r.angle_estimate.grid.empty());
    EXPECT_EQ(r.range_doppler.image.rows(), 4 * 16);
    EXPECT_EQ(r.range_doppler.image.cols(), 4 * 4);
}

TEST(RunTrials, MatchesIndividualTrialsAcrossThreads) {
    SimConfig c = tiny_config();
    c.simulate_radar = false;
    c.threads = 2;
    const auto batch = run_trials(c, 3);
    ASSERT_EQ(batch.size(), 3u);
    for (int t = 0; t < 3; ++t) {
        EXPECT_EQ(batch[std::size_t(t)].trial, t);
        EXPECT_EQ(batch[std::size_t(t)].dl_sum_se, run_trial(c, t).dl_sum_se);
    }
}

TEST(RunTrial, ModuleErrorsCarryTrialContext) {
    SimConfig c = tiny_config();
    c.n_dl_streams = 1;
    c.tau_t_frac = 1.0;
    try {
        run_trial(c, 3);
        FAIL() << "expected TrialFailure";
    } catch (const TrialFailure& e) {
        EXPECT_STREQ(e.kind(), "infeasible");
        EXPECT_EQ(e.trial(), 3);
        EXPECT_NE(std::string(e.what()).find("trial 3"), std::string::npos);
    }
    c = tiny_config();
    c.u_ul = 0;
    EXPECT_THROW(run_trial(c, 0), ConfigError);
}

TEST(DesignPower, TotalDownlinkPowerPerSubcarrier) {
    const SimConfig c = tiny_config();
    const auto s = draw_scenario(c, 11);
    std::vector<HybridPrecoder> dl;
    for (const auto& h : s.dl_channels) dl.push_back(dl_combiner(h, c.n_dl_streams, c.n_ue_rf));
    BsPrecoderInputs in;
    in.scenario = &s;
    in.dl_combiners = &dl;
    in.stream_power = c.dl_stream_power();
    in.design_angle = s.initial_angle;
    in.tau_t = c.tau_t();
    in.n_streams = c.n_dl_streams;
    in.n_rf = c.n_bs_rf;
    const auto d = design_bs_precoders(in);
    for (Index m = 0; m < c.subcarriers; ++m) {
        double total = 0.0;
        for (Index i = 0; i < c.u_dl; ++i) total += c.dl_stream_power() * d.precoder.full(bs_slot(i, m, c.subcarriers)).squaredNorm();
        EXPECT_NEAR(total / c.p_dl(), 1.0, 1e-6);
    }
}

TEST(Sweep, OneBatchPerValue) {
    SimConfig c = tiny_config();
    c.simulate_radar = false;
    c.trials = 1;
    const auto pts = sweep(c, "p_dl_dbm", {"0", "30"});
    ASSERT_EQ(pts.size(), 2u);
    EXPECT_EQ(pts[0].value, "0");
    ASSERT_EQ(pts[1].trials.size(), 1u);
    EXPECT_GT(pts[1].trials[0].dl_sum_se, pts[0].trials[0].dl_sum_se);
    EXPECT_THROW(sweep(c, "no_such_key", {"1"}), ConfigError);
}
