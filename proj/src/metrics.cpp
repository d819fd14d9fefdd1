// SPDX-License-Identifier: Apache-2.0
#include "isac/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "isac/errors.hpp"

namespace isac {

namespace {

double log2det_hermitian_pd(const CMatrix& a) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(a), Eigen::EigenvaluesOnly);
    double acc = 0.0;
    for (Index k = 0; k < es.eigenvalues().size(); ++k) acc += std::log2(std::max(es.eigenvalues()(k), 1e-300));
    return acc;
}

}  // namespace

double spectral_efficiency(const CMatrix& signal, const CMatrix& interference_cov, double stream_power) {
    if (interference_cov.rows() != signal.rows())
        throw ContractViolation("spectral_efficiency: covariance does not match signal rows");
    const CMatrix l = cholesky(interference_cov);
    const CMatrix ws = lower_solve(l, signal);
    CMatrix inner = stream_power * (ws * ws.adjoint());
    inner.diagonal().array() += 1.0;
    return std::max(0.0, log2det_hermitian_pd(inner));
}

double dl_spectral_efficiency(const CMatrix& channel, const CMatrix& combiner,
                              const std::vector<CMatrix>& precoders, std::size_t user,
                              double stream_power, double noise) {
    if (user >= precoders.size()) throw ContractViolation("dl_spectral_efficiency: bad user index");
    const CMatrix eff = combiner.adjoint() * channel;
    CMatrix r = noise * (combiner.adjoint() * combiner);
    for (std::size_t i = 0; i < precoders.size(); ++i) {
        if (i == user) continue;
        const CMatrix x = eff * precoders[i];
        r.noalias() += stream_power * (x * x.adjoint());
    }
    return spectral_efficiency(eff * precoders[user], hermitian_part(r), stream_power);
}

CMatrix bs_interference_covariance(const BsCovarianceInputs& in, std::size_t exclude) {
    if (in.scenario == nullptr || in.precoded_ul == nullptr || in.dl_precoders == nullptr)
        throw ContractViolation("bs_interference_covariance: missing inputs");
    const ScenarioRealization& s = *in.scenario;
    const CMatrix& w = in.analog_combiner;
    const Index nrf = w.cols();

    CMatrix r = s.noise_power * (w.adjoint() * w);
    for (std::size_t j = 0; j < in.precoded_ul->size(); ++j) {
        if (j == exclude) continue;
        const CMatrix x = w.adjoint() * (*in.precoded_ul)[j];
        r.noalias() += in.ul_stream_power * (x * x.adjoint());
    }

    // Transmit covariance p sum_i F F^H.
    CMatrix tx_cov = CMatrix::Zero(s.n_bs_tx, s.n_bs_tx);
    for (const auto& f : *in.dl_precoders) tx_cov.noalias() += in.dl_stream_power * (f * f.adjoint());

    const CMatrix si = w.adjoint() * s.si_channel;
    r.noalias() += s.si_power_ratio * (si * tx_cov * si.adjoint());

    const std::size_t k_targets = s.targets.size();
    std::vector<CVector> rx(k_targets), tx(k_targets);
    for (std::size_t k = 0; k < k_targets; ++k) {
        rx[k] = w.adjoint() * array_response(s.n_bs_rx, s.targets[k].angle);
        tx[k] = array_response(s.n_bs_tx, s.targets[k].angle);
    }
    const Index n_sym = s.numerology.symbols;
    CMatrix tgt = CMatrix::Zero(nrf, nrf);
    for (std::size_t k = 0; k < k_targets; ++k) {
        for (std::size_t l = 0; l < k_targets; ++l) {
            cd avg(0.0, 0.0);
            for (Index n = 0; n < n_sym; ++n)
                avg += target_phase(s.targets[k], in.m, n, s.numerology) *
                       std::conj(target_phase(s.targets[l], in.m, n, s.numerology));
            avg /= static_cast<double>(n_sym);
            const cd coupling = tx[k].dot(tx_cov * tx[l]);
            tgt.noalias() += (s.targets[k].gain * std::conj(s.targets[l].gain) * avg * coupling) *
                             (rx[k] * rx[l].adjoint());
        }
    }
    r += tgt;
    return hermitian_part(r);
}

double ul_spectral_efficiency(const CMatrix& digital_combiner, const CMatrix& effective_channel,
                              const CMatrix& interference_cov, double stream_power) {
    const CMatrix signal = digital_combiner.adjoint() * effective_channel;
    const CMatrix r = digital_combiner.adjoint() * interference_cov * digital_combiner;
    return spectral_efficiency(signal, hermitian_part(r), stream_power);
}

double residual_si_to_noise_db(double si_objective, double rho, double stream_power, Index subcarriers,
                               double noise, double combiner_norm_sq) {
    if (subcarriers < 1 || !(noise > 0.0) || !(combiner_norm_sq > 0.0))
        throw ContractViolation("residual_si_to_noise_db: non-positive normalization");
    const double ratio = rho * stream_power * si_objective / static_cast<double>(subcarriers) /
                         (noise * combiner_norm_sq);
    if (!(ratio > 0.0)) return kSiFloorDb;
    return std::max(kSiFloorDb, 10.0 * std::log10(ratio));
}

double residual_si_to_noise_db(const CMatrix& analog_combiner, const CMatrix& si_channel,
                               const std::vector<CMatrix>& precoders, double rho, double stream_power,
                               Index subcarriers, double noise) {
    const CMatrix x = analog_combiner.adjoint() * si_channel;
    double obj = 0.0;
    for (const auto& f : precoders) obj += (x * f).squaredNorm();
    return residual_si_to_noise_db(obj, rho, stream_power, subcarriers, noise, analog_combiner.squaredNorm());
}

std::vector<double> water_filling(const std::vector<double>& gains, double total_power) {
    std::vector<double> power(gains.size(), 0.0);
    std::vector<std::size_t> order(gains.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return gains[a] > gains[b]; });
    // Try the k strongest modes active; keep the largest k with a positive floor.
    for (std::size_t k = order.size(); k >= 1; --k) {
        double inv_sum = 0.0;
        for (std::size_t t = 0; t < k; ++t) {
            if (!(gains[order[t]] > 0.0)) { inv_sum = -1.0; break; }
            inv_sum += 1.0 / gains[order[t]];
        }
        if (inv_sum < 0.0) continue;
        const double mu = (total_power + inv_sum) / static_cast<double>(k);
        if (mu - 1.0 / gains[order[k - 1]] >= 0.0) {
            for (std::size_t t = 0; t < k; ++t) power[order[t]] = mu - 1.0 / gains[order[t]];
            return power;
        }
    }
    return power;
}

double fully_digital_su_bound(const CMatrix& channel, Index n_streams, double total_power, double noise) {
    const SvdResult sv = svd(channel);
    const Index k = std::min<Index>(n_streams, sv.singular_values.size());
    std::vector<double> gains(static_cast<std::size_t>(k));
    for (Index t = 0; t < k; ++t) gains[static_cast<std::size_t>(t)] = sv.singular_values(t) * sv.singular_values(t) / noise;
    const auto p = water_filling(gains, total_power);
    double se = 0.0;
    for (std::size_t t = 0; t < gains.size(); ++t) se += std::log2(1.0 + p[t] * gains[t]);
    return se;
}

}  // namespace isac
