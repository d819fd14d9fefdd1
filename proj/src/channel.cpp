// SPDX-License-Identifier: Apache-2.0
#include "isac/channel.hpp"

#include <cmath>
#include <random>

#include "isac/config.hpp"
#include "isac/errors.hpp"

namespace isac {

CVector array_response(Index n_antennas, double angle) {
    if (n_antennas < 1) throw ContractViolation("array_response: need at least one antenna");
    CVector a(n_antennas);
    const double s = std::sin(angle);
    for (Index k = 0; k < n_antennas; ++k) a(k) = std::polar(1.0, -kPi * static_cast<double>(k) * s);
    return a;
}

CMatrix dl_channel(const std::vector<PathParams>& paths, Index m, const OfdmNumerology& num,
                   Index n_ue, Index n_bs_tx) {
    if (paths.empty()) throw ContractViolation("dl_channel: no paths");
    CMatrix h = CMatrix::Zero(n_ue, n_bs_tx);
    for (const auto& p : paths) {
        const cd phase = std::polar(1.0, -2.0 * kPi * static_cast<double>(m) * p.delay * num.subcarrier_spacing);
        h.noalias() += (p.gain * phase) * array_response(n_ue, p.aoa) * array_response(n_bs_tx, p.aod).adjoint();
    }
    return h;
}

CMatrix ul_channel(const std::vector<PathParams>& paths, Index m, const OfdmNumerology& num,
                   Index n_bs_rx, Index n_ue) {
    if (paths.empty()) throw ContractViolation("ul_channel: no paths");
    CMatrix g = CMatrix::Zero(n_bs_rx, n_ue);
    for (const auto& p : paths) {
        const cd phase = std::polar(1.0, -2.0 * kPi * static_cast<double>(m) * p.delay * num.subcarrier_spacing);
        g.noalias() += (p.gain * phase) * array_response(n_bs_rx, p.aoa) * array_response(n_ue, p.aod).adjoint();
    }
    return g;
}

cd target_phase(const TargetParams& t, Index m, Index n, const OfdmNumerology& num) {
    const double arg = static_cast<double>(n) * num.symbol_duration() * t.doppler -
                       static_cast<double>(m) * t.round_trip_delay * num.subcarrier_spacing;
    return std::polar(1.0, 2.0 * kPi * arg);
}

CMatrix target_channel(const std::vector<TargetParams>& targets, Index m, Index n,
                       const OfdmNumerology& num, Index n_bs_rx, Index n_bs_tx) {
    CMatrix a = CMatrix::Zero(n_bs_rx, n_bs_tx);
    for (const auto& t : targets) {
        a.noalias() += (t.gain * target_phase(t, m, n, num)) * array_response(n_bs_rx, t.angle) *
                       array_response(n_bs_tx, t.angle).adjoint();
    }
    return a;
}

double radar_gain_power(double wavelength, double rcs, double range) {
    if (!(range > 0.0)) throw ContractViolation("radar_gain_power: range must be positive");
    const double four_pi = 4.0 * kPi;
    return wavelength * wavelength * rcs / (four_pi * four_pi * four_pi * std::pow(range, 4));
}

std::vector<Eigen::Vector3d> ula_positions(Index n, double spacing, double z_offset) {
    std::vector<Eigen::Vector3d> pos;
    pos.reserve(static_cast<std::size_t>(n));
    for (Index k = 0; k < n; ++k) pos.emplace_back(spacing * static_cast<double>(k), 0.0, z_offset);
    return pos;
}

CMatrix si_channel(const std::vector<Eigen::Vector3d>& tx_positions,
                   const std::vector<Eigen::Vector3d>& rx_positions, double wavelength) {
    const Index nt = static_cast<Index>(tx_positions.size());
    const Index nr = static_cast<Index>(rx_positions.size());
    if (nt == 0 || nr == 0) throw ContractViolation("si_channel: empty array");
    CMatrix h(nr, nt);
    double inv_sq_sum = 0.0;
    for (Index p = 0; p < nr; ++p) {
        for (Index q = 0; q < nt; ++q) {
            const double d = (rx_positions[static_cast<std::size_t>(p)] -
                              tx_positions[static_cast<std::size_t>(q)]).norm();
            if (!(d > 0.0)) throw ContractViolation("si_channel: coincident TX/RX elements");
            h(p, q) = std::polar(1.0 / d, -2.0 * kPi * d / wavelength);
            inv_sq_sum += 1.0 / (d * d);
        }
    }
    const double gamma = std::sqrt(static_cast<double>(nt * nr) / inv_sq_sum);
    return gamma * h;
}

double tx_radar_gain(const CVector& precoder_column, double angle) {
    return std::abs(array_response(precoder_column.size(), angle).dot(precoder_column));
}

double rx_radar_gain(const CVector& combiner_column, double angle) {
    return std::abs(combiner_column.dot(array_response(combiner_column.size(), angle)));
}

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

cd random_phase(std::mt19937_64& rng) { return std::polar(1.0, uniform(rng, -kPi, kPi)); }

// LoS plus (paths - 1) NLoS components. The BS-side LoS angle is `bs_angle`;
// the UE array faces the BS, so its LoS angle is broadside.
std::vector<PathParams> draw_ue_paths(const SimConfig& c, std::mt19937_64& rng, double bs_angle,
                                      bool bs_is_receiver) {
    const double lambda = kSpeedOfLight / c.carrier_hz;
    const double los_amp = lambda / (4.0 * kPi * c.ue_distance_m);
    const double los_delay = c.ue_distance_m / kSpeedOfLight;
    std::vector<PathParams> paths;
    paths.reserve(static_cast<std::size_t>(c.ue_paths));

    PathParams los;
    los.gain = los_amp * random_phase(rng);
    los.delay = los_delay;
    los.aoa = bs_is_receiver ? bs_angle : 0.0;
    los.aod = bs_is_receiver ? 0.0 : bs_angle;
    paths.push_back(los);

    for (int l = 1; l < c.ue_paths; ++l) {
        PathParams p;
        const double rel_db = uniform(rng, c.nlos_rel_min_db, c.nlos_rel_max_db);
        p.gain = los_amp * std::pow(10.0, -rel_db / 20.0) * random_phase(rng);
        p.delay = los_delay + uniform(rng, 0.0, c.nlos_excess_delay_max_s);
        p.aoa = uniform(rng, -kPi / 2, kPi / 2);
        p.aod = uniform(rng, -kPi / 2, kPi / 2);
        paths.push_back(p);
    }
    return paths;
}

}  // namespace

ScenarioRealization draw_scenario(const SimConfig& c, std::uint64_t seed) {
    c.validate();
    std::mt19937_64 rng(seed);
    ScenarioRealization s;
    s.numerology = c.numerology();
    s.n_bs_tx = c.n_bs_tx;
    s.n_bs_rx = c.n_bs_rx;
    s.n_ue = c.n_ue;
    const double lambda = s.numerology.wavelength();

    for (int k = 0; k < c.targets; ++k) {
        TargetParams t;
        t.angle = deg_to_rad(uniform(rng, c.target_angle_min_deg, c.target_angle_max_deg));
        t.range = uniform(rng, c.target_range_min_m, c.target_range_max_m);
        t.velocity = uniform(rng, c.target_speed_min_mps, c.target_speed_max_mps);
        t.rcs = c.rcs;
        t.round_trip_delay = 2.0 * t.range / kSpeedOfLight;
        t.doppler = 2.0 * t.velocity / lambda;
        t.gain = std::sqrt(radar_gain_power(lambda, t.rcs, t.range)) * random_phase(rng);
        s.targets.push_back(t);
    }
    std::normal_distribution<double> angle_error(0.0, deg_to_rad(c.initial_angle_error_deg));
    s.initial_angle = s.targets.front().angle + angle_error(rng);

    for (int i = 0; i < c.u_dl; ++i) {
        const double bs_angle = deg_to_rad(uniform(rng, c.ue_angle_min_deg, c.ue_angle_max_deg));
        s.dl_paths.push_back(draw_ue_paths(c, rng, bs_angle, false));
    }
    for (int j = 0; j < c.u_ul; ++j) {
        const double bs_angle = deg_to_rad(uniform(rng, c.ue_angle_min_deg, c.ue_angle_max_deg));
        s.ul_paths.push_back(draw_ue_paths(c, rng, bs_angle, true));
    }

    const Index M = s.numerology.subcarriers;
    for (const auto& paths : s.dl_paths) {
        std::vector<CMatrix> per_m;
        per_m.reserve(static_cast<std::size_t>(M));
        for (Index m = 0; m < M; ++m) per_m.push_back(dl_channel(paths, m, s.numerology, s.n_ue, s.n_bs_tx));
        s.dl_channels.push_back(std::move(per_m));
    }
    for (const auto& paths : s.ul_paths) {
        std::vector<CMatrix> per_m;
        per_m.reserve(static_cast<std::size_t>(M));
        for (Index m = 0; m < M; ++m) per_m.push_back(ul_channel(paths, m, s.numerology, s.n_bs_rx, s.n_ue));
        s.ul_channels.push_back(std::move(per_m));
    }

    const double half = lambda / 2.0;
    s.si_channel = si_channel(ula_positions(s.n_bs_tx, half, 0.0),
                              ula_positions(s.n_bs_rx, half, c.si_separation_wavelengths * lambda), lambda);
    s.si_power_ratio = c.si_power_ratio();
    s.noise_power = c.noise_power();
    s.ue_noise_power = c.ue_noise_power();
    return s;
}

}  // namespace isac
