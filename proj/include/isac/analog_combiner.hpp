// SPDX-License-Identifier: Apache-2.0
//
// Unit-modulus analog combiner at the FD BS receiver: residual-SI
// minimization under RX radar gain and communication gain constraints,
// solved by random block coordinate descent on a relaxed convex subproblem.
#pragma once

#include <random>
#include <vector>

#include "isac/numerics.hpp"

namespace isac {

struct CombinerDesignConfig {
    double tau_r = 0.0;    // linear, <= N_BS,R
    double tau_com = 0.0;  // linear, <= N_BS,R
    double eps1 = 0.3;
    double eps2 = 0.1;
    double kappa2 = 0.5;
    double block_fraction = 0.25;
    int max_iters = 200;
    double convergence_tol = 1e-5;
};

/// Communication directions from the precoded UL channels
/// precoded_ul[j][m] = G_m^(j) V_m^(j): the top n_streams eigenvectors of
/// (1/M) sum_m G V V^H G^H for each user, padded with random combinations
/// (or truncated by eigenvalue) to n_rf columns, each of norm sqrt(N_BS,R).
CMatrix comm_eigen_directions(const std::vector<std::vector<CMatrix>>& precoded_ul, Index n_streams,
                              Index n_rf, std::mt19937_64& rng);

struct InitialCombiner {
    CMatrix w;      // unit modulus, columns rotated so w^H a(theta) is real positive
    CMatrix w_com;  // communication directions rotated so w^H w_com is real positive
};

/// Entrywise phase of kappa2 W_com + (1 - kappa2) [a(theta), ..., a(theta)],
/// with each W_com column first rotated to be in phase with a(theta).
InitialCombiner initial_combiner(const CMatrix& w_com, double angle, double kappa2);

/// Q = H_SI (sum_slots F F^H) H_SI^H, so that the SI objective is
/// sum_r w_r^H Q w_r.
CMatrix si_quadratic(const CMatrix& si_channel, const std::vector<CMatrix>& precoders);

/// sum over slots of ||W^H H_SI F||_F^2.
double si_objective(const CMatrix& w, const CMatrix& si_channel, const std::vector<CMatrix>& precoders);
double si_objective(const CMatrix& w, const CMatrix& q);

struct BcdProblem {
    CMatrix q;         // SI quadratic form
    CVector steering;  // a_BS,R(design angle)
    CMatrix w_com;     // aligned communication directions
    double tau_r = 0.0;
    double tau_com = 0.0;
    double eps1 = 0.3;
    double eps2 = 0.1;
};

/// Largest amount by which any column's gain loss exceeds its threshold
/// (0 when every constraint holds).
double gain_loss_violation(const CMatrix& w, const BcdProblem& problem);

struct BcdStepResult {
    CMatrix w;
    double objective = 0.0;
    bool accepted = false;
    bool infeasible = false;
};

/// One block update. `block` holds column-major entry indices of W. The
/// relaxed subproblem is solved by penalty-augmented projected gradient; the
/// result is projected back to unit modulus and accepted only if it does not
/// increase the objective (and does not worsen constraint violation beyond
/// `slack`). Rejected steps return W_prev.
BcdStepResult bcd_step(const CMatrix& w_prev, double prev_objective, const std::vector<Index>& block,
                       const BcdProblem& problem, double slack);

struct CombinerTraceRow {
    int iteration = 0;
    double objective = 0.0;
    double residual_si_to_noise_db = 0.0;
    bool accepted = false;
    bool infeasible = false;
};

struct AnalogCombinerDesign {
    CMatrix w;
    CMatrix w_com;
    std::vector<CombinerTraceRow> trace;  // row 0 is the initial combiner
    int accepted_steps = 0;
    int infeasible_steps = 0;
};

struct SiMetricScale {
    double rho = 0.0;
    double stream_power = 0.0;
    Index subcarriers = 1;
    double noise = 1.0;
};

/// Random BCD from `init` until the relative objective change stays below
/// convergence_tol for 5 consecutive accepted steps or max_iters is reached.
AnalogCombinerDesign design_analog_combiner(const InitialCombiner& init, const CMatrix& q, double angle,
                                            const CombinerDesignConfig& config, const SiMetricScale& scale,
                                            std::mt19937_64& rng);

}  // namespace isac
