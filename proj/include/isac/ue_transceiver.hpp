// SPDX-License-Identifier: Apache-2.0
//
// Single-user SVD transceivers at the UEs, factorized onto a
// frequency-flat analog stage. Slots are subcarriers.
#pragma once

#include <vector>

#include "isac/bs_precoder.hpp"

namespace isac {

/// Per-subcarrier top-n left singular vectors of H_m, factorized with n_rf
/// RF chains; trace(W^H W) = n_streams on every subcarrier.
HybridPrecoder dl_combiner(const std::vector<CMatrix>& channels, Index n_streams, Index n_rf,
                           const FactorizationOptions& opts = {});

/// Per-subcarrier top-n right singular vectors of G_m (the UE-side
/// directions), factorized with n_rf RF chains; ||V||_F^2 = n_streams.
HybridPrecoder ul_precoder(const std::vector<CMatrix>& channels, Index n_streams, Index n_rf,
                           const FactorizationOptions& opts = {});

}  // namespace isac
