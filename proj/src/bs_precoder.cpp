// SPDX-License-Identifier: Apache-2.0
#include "isac/bs_precoder.hpp"

#include <cmath>
#include <string>

#include "isac/errors.hpp"

namespace isac {

CMatrix LeakageMatrices::denominator() const {
    CMatrix d = cross + si;
    d.diagonal().array() += noise;
    return d;
}

CMatrix si_leakage(const CMatrix& si_channel, const CMatrix& analog_combiner, double stream_power,
                   double rho) {
    const Index nt = si_channel.cols();
    if (analog_combiner.size() == 0) return CMatrix::Zero(nt, nt);
    if (analog_combiner.rows() != si_channel.rows())
        throw ContractViolation("si_leakage: combiner rows do not match SI channel");
    const CMatrix x = analog_combiner.adjoint() * si_channel;
    return hermitian_part((stream_power * rho) * (x.adjoint() * x));
}

std::vector<LeakageMatrices> leakage_matrices(const std::vector<CMatrix>& channels,
                                              const std::vector<CMatrix>& combiners,
                                              const CMatrix& si_leak, double stream_power,
                                              double noise) {
    if (channels.size() != combiners.size() || channels.empty())
        throw ContractViolation("leakage_matrices: channel/combiner count mismatch");
    const Index nt = channels.front().cols();
    if (si_leak.rows() != nt || si_leak.cols() != nt)
        throw ContractViolation("leakage_matrices: SI leakage has wrong size");

    std::vector<CMatrix> own;
    own.reserve(channels.size());
    for (std::size_t i = 0; i < channels.size(); ++i) {
        if (channels[i].cols() != nt || combiners[i].rows() != channels[i].rows())
            throw ContractViolation("leakage_matrices: dimension mismatch for user " + std::to_string(i));
        const CMatrix eff = combiners[i].adjoint() * channels[i];
        own.push_back(hermitian_part(stream_power * (eff.adjoint() * eff)));
    }
    CMatrix total = CMatrix::Zero(nt, nt);
    for (const auto& b : own) total += b;

    std::vector<LeakageMatrices> out(channels.size());
    for (std::size_t i = 0; i < channels.size(); ++i) {
        out[i].own = own[i];
        out[i].cross = total - own[i];
        out[i].si = si_leak;
        out[i].noise = noise;
    }
    return out;
}

double slnr(const CMatrix& f, const CMatrix& numerator, const CMatrix& denominator) {
    const double num = (f.adjoint() * numerator * f).trace().real();
    const double den = (f.adjoint() * denominator * f).trace().real();
    return num / den;
}

CMatrix comm_precoder_slnr(const LeakageMatrices& leak, Index n_streams) {
    if (n_streams < 1 || n_streams > leak.own.rows())
        throw ContractViolation("comm_precoder_slnr: bad stream count");
    const EigenDecomposition ed = generalized_hermitian_eig(leak.own, leak.denominator());
    return ed.vectors.leftCols(n_streams);
}

CMatrix sensing_precoder_slnr(const LeakageMatrices& leak, double angle, Index n_streams) {
    if (n_streams < 1) throw ContractViolation("sensing_precoder_slnr: bad stream count");
    const CMatrix l = cholesky(leak.denominator());
    const CVector a = array_response(l.rows(), angle);
    const CVector y = lower_solve(l, a);
    CVector f = l.adjoint().triangularView<Eigen::Upper>().solve(y);
    f /= f.norm();
    return f.replicate(1, n_streams);
}

CombinedPrecoder combine_precoders(const CMatrix& f_com, const CMatrix& f_rad, double angle,
                                   double tau_t) {
    if (f_com.rows() != f_rad.rows() || f_com.cols() != f_rad.cols())
        throw ContractViolation("combine_precoders: shape mismatch");
    const Index ns = f_com.cols();
    const CVector a = array_response(f_com.rows(), angle);

    CMatrix rad = f_rad;
    for (Index s = 0; s < ns; ++s) {
        const cd z_com = a.dot(f_com.col(s));
        const cd z_rad = a.dot(rad.col(s));
        if (std::abs(z_com) > 0.0 && std::abs(z_rad) > 0.0)
            rad.col(s) *= (z_com / std::abs(z_com)) / (z_rad / std::abs(z_rad));
    }

    const double target_norm = std::sqrt(static_cast<double>(ns));
    Index failing = 0;
    for (int step = 100; step >= 0; --step) {
        const double kappa = step / 100.0;
        CMatrix f = kappa * f_com + (1.0 - kappa) * rad;
        const double nrm = f.norm();
        if (!(nrm > 0.0)) continue;
        f *= target_norm / nrm;
        bool ok = true;
        for (Index s = 0; s < ns && ok; ++s) {
            if (std::abs(a.dot(f.col(s))) < tau_t) {
                ok = false;
                failing = s;
            }
        }
        if (ok) return {f, kappa};
    }
    throw InfeasibleError("combine_precoders: TX gain threshold unreachable",
                          static_cast<std::size_t>(failing));
}

HybridPrecoder hybrid_factorize(const std::vector<CMatrix>& targets, Index n_rf,
                                const FactorizationOptions& opts) {
    if (targets.empty()) throw ContractViolation("hybrid_factorize: no targets");
    const Index n = targets.front().rows();
    const Index ns = targets.front().cols();
    if (n_rf < ns) throw ContractViolation("hybrid_factorize: n_rf smaller than stream count");
    if (n_rf > n) throw ContractViolation("hybrid_factorize: n_rf larger than antenna count");
    for (const auto& t : targets)
        if (t.rows() != n || t.cols() != ns) throw ContractViolation("hybrid_factorize: ragged targets");
    const std::size_t k_slots = targets.size();

    CMatrix stacked(n, ns * static_cast<Index>(k_slots));
    for (std::size_t k = 0; k < k_slots; ++k) stacked.middleCols(ns * static_cast<Index>(k), ns) = targets[k];
    const SvdResult sv = svd(stacked);
    CMatrix analog(n, n_rf);
    const Index from_svd = std::min<Index>(n_rf, sv.u.cols());
    analog.leftCols(from_svd) = unit_modulus(sv.u.leftCols(from_svd));
    for (Index j = from_svd; j < n_rf; ++j) analog.col(j).setOnes();

    HybridPrecoder hp;
    hp.digital.resize(k_slots);
    std::vector<CMatrix> residual(k_slots);

    auto least_squares = [&]() {
        const auto cod = analog.completeOrthogonalDecomposition();
        double err = 0.0;
        for (std::size_t k = 0; k < k_slots; ++k) {
            hp.digital[k] = cod.solve(targets[k]);
            residual[k] = targets[k] - analog * hp.digital[k];
            err += residual[k].squaredNorm();
        }
        return err;
    };

    double energy = 0.0;
    for (const auto& t : targets) energy += t.squaredNorm();
    const double exact = 1e-20 * energy;

    double err = least_squares();
    hp.error_trace.push_back(err);
    for (int it = 0; it < opts.max_iters && err > exact; ++it) {
        for (Index j = 0; j < n_rf; ++j) {
            CVector g = CVector::Zero(n);
            for (std::size_t k = 0; k < k_slots; ++k) {
                const auto b = hp.digital[k].row(j);
                g.noalias() += (residual[k] + analog.col(j) * b) * b.adjoint();
            }
            const CVector f_new = unit_modulus(g);
            const CVector delta = analog.col(j) - f_new;
            for (std::size_t k = 0; k < k_slots; ++k) residual[k].noalias() += delta * hp.digital[k].row(j);
            analog.col(j) = f_new;
        }
        const double next = least_squares();
        hp.error_trace.push_back(next);
        const double improvement = (err - next) / err;
        err = next;
        if (improvement < opts.tol) break;
    }

    const double target_norm = std::sqrt(static_cast<double>(ns));
    for (auto& d : hp.digital) {
        const double nrm = (analog * d).norm();
        if (nrm > 0.0) d *= target_norm / nrm;
    }
    hp.analog = std::move(analog);
    return hp;
}

BsPrecoderDesign design_bs_precoders(const BsPrecoderInputs& in) {
    if (in.scenario == nullptr || in.dl_combiners == nullptr)
        throw ContractViolation("design_bs_precoders: missing inputs");
    const ScenarioRealization& s = *in.scenario;
    const Index M = s.numerology.subcarriers;
    const Index users = static_cast<Index>(s.dl_channels.size());
    if (static_cast<Index>(in.dl_combiners->size()) != users)
        throw ContractViolation("design_bs_precoders: one combiner per DL user required");

    const CMatrix c_bar = in.include_si
                              ? si_leakage(s.si_channel, in.analog_combiner, in.stream_power, s.si_power_ratio)
                              : CMatrix::Zero(s.n_bs_tx, s.n_bs_tx);

    BsPrecoderDesign out;
    out.fully_digital.resize(static_cast<std::size_t>(users * M));
    out.kappa1.resize(static_cast<std::size_t>(users * M));
    std::vector<CMatrix> channels(static_cast<std::size_t>(users));
    std::vector<CMatrix> combiners(static_cast<std::size_t>(users));
    for (Index m = 0; m < M; ++m) {
        for (Index i = 0; i < users; ++i) {
            channels[static_cast<std::size_t>(i)] = s.dl_channels[static_cast<std::size_t>(i)][static_cast<std::size_t>(m)];
            combiners[static_cast<std::size_t>(i)] = (*in.dl_combiners)[static_cast<std::size_t>(i)].full(static_cast<std::size_t>(m));
        }
        const auto leak = leakage_matrices(channels, combiners, c_bar, in.stream_power, s.ue_noise_power);
        for (Index i = 0; i < users; ++i) {
            const auto& l = leak[static_cast<std::size_t>(i)];
            const CMatrix f_com = comm_precoder_slnr(l, in.n_streams);
            const CMatrix f_rad = sensing_precoder_slnr(l, in.design_angle, in.n_streams);
            const CombinedPrecoder c = combine_precoders(f_com, f_rad, in.design_angle, in.tau_t);
            const std::size_t slot = bs_slot(i, m, M);
            out.fully_digital[slot] = c.f;
            out.kappa1[slot] = c.kappa1;
        }
    }
    out.precoder = hybrid_factorize(out.fully_digital, in.n_rf, in.factorization);
    return out;
}

}  // namespace isac
