// SPDX-License-Identifier: Apache-2.0
#include "isac/ue_transceiver.hpp"

#include "isac/errors.hpp"

namespace isac {

namespace {

void check(const std::vector<CMatrix>& channels, Index n_streams, Index n_rf, bool ue_on_rows) {
    if (channels.empty()) throw ContractViolation("ue transceiver: no channels");
    const Index ue_dim = ue_on_rows ? channels.front().rows() : channels.front().cols();
    if (n_streams < 1 || n_streams > n_rf || n_rf > ue_dim)
        throw ContractViolation("ue transceiver: need n_streams <= n_rf <= N_UE");
}

}  // namespace

HybridPrecoder dl_combiner(const std::vector<CMatrix>& channels, Index n_streams, Index n_rf,
                           const FactorizationOptions& opts) {
    check(channels, n_streams, n_rf, true);
    std::vector<CMatrix> targets;
    targets.reserve(channels.size());
    for (const auto& h : channels) targets.push_back(svd(h).u.leftCols(n_streams));
    return hybrid_factorize(targets, n_rf, opts);
}

HybridPrecoder ul_precoder(const std::vector<CMatrix>& channels, Index n_streams, Index n_rf,
                           const FactorizationOptions& opts) {
    check(channels, n_streams, n_rf, false);
    std::vector<CMatrix> targets;
    targets.reserve(channels.size());
    for (const auto& g : channels) targets.push_back(svd(g).v.leftCols(n_streams));
    return hybrid_factorize(targets, n_rf, opts);
}

}  // namespace isac
