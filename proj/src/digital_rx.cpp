// SPDX-License-Identifier: Apache-2.0
#include "isac/digital_rx.hpp"

#include "isac/channel.hpp"
#include "isac/errors.hpp"

namespace isac {

CMatrix ul_interference_covariance(const CMatrix& analog_combiner, const std::vector<CMatrix>& precoded_ul,
                                   double stream_power, double noise) {
    CMatrix r = noise * (analog_combiner.adjoint() * analog_combiner);
    for (const auto& gv : precoded_ul) {
        if (gv.rows() != analog_combiner.rows())
            throw ContractViolation("ul_interference_covariance: channel rows do not match combiner");
        const CMatrix x = analog_combiner.adjoint() * gv;
        r.noalias() += stream_power * (x * x.adjoint());
    }
    return hermitian_part(r);
}

CovarianceFactor::CovarianceFactor(const CMatrix& covariance) : l_(cholesky(covariance)) {}

CMatrix CovarianceFactor::solve(const CMatrix& b) const {
    const CMatrix y = lower_solve(l_, b);
    return l_.adjoint().triangularView<Eigen::Upper>().solve(y);
}

CMatrix lmmse_combiner(const CovarianceFactor& factor, const CMatrix& analog_combiner,
                       const CMatrix& precoded_channel) {
    return factor.solve(analog_combiner.adjoint() * precoded_channel);
}

CVector mvdr_combiner(const CovarianceFactor& factor, const CMatrix& analog_combiner, double angle) {
    const CVector a = array_response(analog_combiner.rows(), angle);
    const CVector b = analog_combiner.adjoint() * a;
    const double scale = analog_combiner.norm() * a.norm();
    if (!(b.norm() > 1e-12 * scale)) throw DegenerateSteering("mvdr_combiner: steering vector vanished");
    const CVector rb = factor.solve(b);
    const cd denom = b.dot(rb);
    return rb / denom.real();
}

DigitalCombiners design_digital_combiners(const CMatrix& analog_combiner,
                                          const std::vector<std::vector<CMatrix>>& precoded_ul,
                                          Index subcarriers, double stream_power, double noise,
                                          double radar_angle) {
    DigitalCombiners out;
    out.lmmse.assign(precoded_ul.size(), {});
    out.mvdr.reserve(static_cast<std::size_t>(subcarriers));
    std::vector<CMatrix> at_m(precoded_ul.size());
    for (Index m = 0; m < subcarriers; ++m) {
        for (std::size_t j = 0; j < precoded_ul.size(); ++j) at_m[j] = precoded_ul[j].at(static_cast<std::size_t>(m));
        const CovarianceFactor factor(ul_interference_covariance(analog_combiner, at_m, stream_power, noise));
        for (std::size_t j = 0; j < precoded_ul.size(); ++j)
            out.lmmse[j].push_back(lmmse_combiner(factor, analog_combiner, at_m[j]));
        out.mvdr.push_back(mvdr_combiner(factor, analog_combiner, radar_angle));
    }
    return out;
}

}  // namespace isac
