// SPDX-License-Identifier: Apache-2.0
//
// Digital combiners behind the BS analog combiner: per-user LMMSE for UL
// data and per-subcarrier MVDR for radar. Both invert the same UL
// interference-plus-noise covariance, factored once per subcarrier.
#pragma once

#include <vector>

#include "isac/numerics.hpp"

namespace isac {

/// R_m = sum_j p W^H G V V^H G^H W + sigma^2 W^H W. `precoded_ul[j]` is
/// G_m^(j) V_m^(j) at the subcarrier of interest.
CMatrix ul_interference_covariance(const CMatrix& analog_combiner, const std::vector<CMatrix>& precoded_ul,
                                   double stream_power, double noise);

/// Cholesky factor of one subcarrier's covariance, reused by every solve.
class CovarianceFactor {
public:
    explicit CovarianceFactor(const CMatrix& covariance);
    CMatrix solve(const CMatrix& b) const;  // R^-1 b
    const CMatrix& lower() const { return l_; }

private:
    CMatrix l_;
};

/// W_BB = R^-1 W^H G V for one user.
CMatrix lmmse_combiner(const CovarianceFactor& factor, const CMatrix& analog_combiner,
                       const CMatrix& precoded_channel);

/// w = R^-1 b / (b^H R^-1 b) with b = W^H a_BS,R(angle). Throws
/// DegenerateSteering when b vanishes.
CVector mvdr_combiner(const CovarianceFactor& factor, const CMatrix& analog_combiner, double angle);

struct DigitalCombiners {
    std::vector<std::vector<CMatrix>> lmmse;  // [user][m]
    std::vector<CVector> mvdr;                // [m]
};

/// Builds every LMMSE and MVDR combiner with one factorization per
/// subcarrier. precoded_ul[j][m] = G_m^(j) V_m^(j).
DigitalCombiners design_digital_combiners(const CMatrix& analog_combiner,
                                          const std::vector<std::vector<CMatrix>>& precoded_ul,
                                          Index subcarriers, double stream_power, double noise,
                                          double radar_angle);

}  // namespace isac
