// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "isac/config.hpp"
#include "isac/errors.hpp"
#include "isac/ue_transceiver.hpp"
#include "test_util.hpp"

using namespace isac;
using isac::test::random_matrix;
using isac::test::random_unit_modulus;

namespace {

// Sine of the largest principal angle between the column spaces of a and b.
double subspace_distance(const CMatrix& a, const CMatrix& b) {
    const CMatrix qa = a.householderQr().householderQ() * CMatrix::Identity(a.rows(), a.cols());
    const CMatrix qb = b.householderQr().householderQ() * CMatrix::Identity(b.rows(), b.cols());
    const auto s = svd(qa.adjoint() * qb);
    const double c = s.singular_values(s.singular_values.size() - 1);
    return std::sqrt(std::max(0.0, 1.0 - c * c));
}

}  // namespace

TEST(DlCombiner, RankOneChannelAlignsWithReceiveDirection) {
    std::mt19937_64 rng(1);
    const CMatrix a = random_unit_modulus(8, 1, rng);
    const CMatrix b = random_matrix(16, 1, rng);
    const HybridPrecoder u = dl_combiner({a * b.adjoint()}, 1, 1);
    const CVector w = u.full(0);
    EXPECT_NEAR(std::abs(w.dot(a.col(0))) / (w.norm() * a.norm()), 1.0, 1e-9);
    EXPECT_NEAR(w.squaredNorm(), 1.0, 1e-12);
}

TEST(DlCombiner, FrequencyFlatChannelGivesEqualDigitalParts) {
    std::mt19937_64 rng(2);
    const CMatrix h = random_matrix(8, 16, rng);
    const HybridPrecoder u = dl_combiner(std::vector<CMatrix>(6, h), 2, 4);
    for (std::size_t m = 1; m < 6; ++m) EXPECT_LT((u.digital[m] - u.digital[0]).norm(), 1e-12);
}

TEST(DlCombiner, PowerAndUnitModulusOnScenario) {
    SimConfig c = desk_profile();
    c.subcarriers = 16;
    const auto s = draw_scenario(c, 5);
    for (const auto& per_m : s.dl_channels) {
        const HybridPrecoder u = dl_combiner(per_m, c.n_dl_streams, c.n_ue_rf);
        EXPECT_LT((u.analog.cwiseAbs().array() - 1.0).abs().maxCoeff(), 1e-9);
        double worst = 0.0;
        for (std::size_t m = 0; m < per_m.size(); ++m) {
            EXPECT_NEAR(u.full(m).squaredNorm(), double(c.n_dl_streams), 1e-9);
            worst = std::max(worst, subspace_distance(u.full(m), svd(per_m[m]).u.leftCols(c.n_dl_streams)));
        }
        RecordProperty("max_subspace_distance", std::to_string(worst));
    }
}

TEST(UlPrecoder, RankOneChannelAlignsWithTransmitDirection) {
    std::mt19937_64 rng(3);
    const CMatrix a = random_matrix(16, 1, rng);
    const CMatrix b = random_unit_modulus(8, 1, rng);
    const HybridPrecoder v = ul_precoder({a * b.adjoint()}, 1, 1);
    const CVector f = v.full(0);
    ASSERT_EQ(f.size(), 8);
    EXPECT_NEAR(std::abs(f.dot(b.col(0))) / (f.norm() * b.norm()), 1.0, 1e-9);
    EXPECT_NEAR(f.squaredNorm(), 1.0, 1e-12);
}

TEST(UlPrecoder, FrequencyFlatAndPower) {
    std::mt19937_64 rng(4);
    const CMatrix g = random_matrix(32, 8, rng);
    const HybridPrecoder v = ul_precoder(std::vector<CMatrix>(4, g), 2, 2);
    for (std::size_t m = 0; m < 4; ++m) {
        EXPECT_LT((v.digital[m] - v.digital[0]).norm(), 1e-12);
        EXPECT_NEAR(v.full(m).squaredNorm(), 2.0, 1e-9);
        EXPECT_EQ(v.full(m).rows(), 8);
    }
}

TEST(UeTransceiver, RejectsBadStreamCounts) {
    const std::vector<CMatrix> h{CMatrix::Ones(4, 8)};
    EXPECT_THROW(dl_combiner(h, 3, 2), ContractViolation);
    EXPECT_THROW(dl_combiner(h, 1, 5), ContractViolation);
    EXPECT_THROW(ul_precoder({}, 1, 1), ContractViolation);
}
