// SPDX-License-Identifier: Apache-2.0
#include "isac/analog_combiner.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <numeric>

#include "isac/channel.hpp"
#include "isac/errors.hpp"
#include "isac/metrics.hpp"

namespace isac {

namespace {

constexpr double kPenaltyWeight = 1e4;
constexpr double kArmijo = 1e-4;
constexpr int kInnerIters = 100;
constexpr double kFirstOrderTol = 1e-6;
constexpr int kDykstraIters = 100;
constexpr int kStableSteps = 5;

struct Candidate {
    CVector v;
    double value;
};

double column_loss(const CMatrix& w, Index r, const CVector& ref) {
    return std::abs(static_cast<double>(w.rows()) - w.col(r).dot(ref));
}

// Projection onto { x : ||x - center|| <= radius }.
void project_ball(CVector& x, const CVector& center, double radius) {
    const CVector d = x - center;
    const double n = d.norm();
    if (n > radius) x = center + d * (radius / n);
}

// Projection onto { x : |x_k| <= bound for every k }.
void project_box(CVector& x, double bound) {
    for (Index k = 0; k < x.size(); ++k) {
        const double a = std::abs(x(k));
        if (a > bound) x(k) *= bound / a;
    }
}

bool in_box(const CVector& x, double bound) { return x.cwiseAbs().maxCoeff() <= bound * (1.0 + 1e-12); }

// Dykstra's alternating projection onto ball(center, eps2) intersect box(1 + eps1).
CVector project_feasible(const CVector& y, const CVector& center, double eps2, double box) {
    CVector x = y;
    project_ball(x, center, eps2);
    if (in_box(x, box)) return x;
    CVector p = CVector::Zero(y.size());
    CVector q = CVector::Zero(y.size());
    x = y;
    for (int it = 0; it < kDykstraIters; ++it) {
        CVector z = x + p;
        project_box(z, box);
        p = x + p - z;
        CVector x_next = z + q;
        project_ball(x_next, center, eps2);
        q = z + q - x_next;
        const double change = (x_next - x).norm();
        x = std::move(x_next);
        if (change < 1e-14) break;
    }
    return x;
}

// Penalized, scaled subproblem restricted to the selected entries.
class Subproblem {
public:
    Subproblem(const CMatrix& w_prev, const std::vector<Index>& block, const BcdProblem& pb, double f_scale)
        : w_(w_prev), block_(block), pb_(pb), f_scale_(f_scale),
          n_(static_cast<double>(w_prev.rows())), thr_r_(n_ - pb.tau_r), thr_c_(n_ - pb.tau_com) {}

    CVector gather() const {
        CVector x(static_cast<Index>(block_.size()));
        for (std::size_t k = 0; k < block_.size(); ++k) x(static_cast<Index>(k)) = w_.data()[block_[k]];
        return x;
    }

    void scatter(const CVector& x) {
        for (std::size_t k = 0; k < block_.size(); ++k) w_.data()[block_[k]] = x(static_cast<Index>(k));
    }

    const CMatrix& w() const { return w_; }

    // Returns F(x) and fills the real gradient (2 dF/d conj(x)).
    double evaluate(const CVector& x, CVector* grad) {
        scatter(x);
        const CMatrix qw = pb_.q * w_;
        double f = 0.0;
        for (Index r = 0; r < w_.cols(); ++r) f += w_.col(r).dot(qw.col(r)).real();
        double value = f / f_scale_;

        const Index cols = w_.cols();
        std::vector<cd> coef_r(static_cast<std::size_t>(cols), cd(0.0, 0.0));
        std::vector<cd> coef_c(static_cast<std::size_t>(cols), cd(0.0, 0.0));
        for (Index r = 0; r < cols; ++r) {
            const cd zr = n_ - w_.col(r).dot(pb_.steering);
            const double hr = std::max(0.0, std::abs(zr) - thr_r_) / n_;
            value += kPenaltyWeight * hr * hr;
            if (hr > 0.0) coef_r[static_cast<std::size_t>(r)] = -kPenaltyWeight * hr / n_ * std::conj(zr) / std::abs(zr);

            const cd zc = n_ - w_.col(r).dot(pb_.w_com.col(r));
            const double hc = std::max(0.0, std::abs(zc) - thr_c_) / n_;
            value += kPenaltyWeight * hc * hc;
            if (hc > 0.0) coef_c[static_cast<std::size_t>(r)] = -kPenaltyWeight * hc / n_ * std::conj(zc) / std::abs(zc);
        }

        if (grad != nullptr) {
            grad->resize(static_cast<Index>(block_.size()));
            const Index rows = w_.rows();
            for (std::size_t k = 0; k < block_.size(); ++k) {
                const Index p = block_[k] % rows;
                const Index r = block_[k] / rows;
                cd g = qw(p, r) / f_scale_;
                g += coef_r[static_cast<std::size_t>(r)] * pb_.steering(p);
                g += coef_c[static_cast<std::size_t>(r)] * pb_.w_com(p, r);
                (*grad)(static_cast<Index>(k)) = 2.0 * g;
            }
        }
        return value;
    }

private:
    CMatrix w_;
    const std::vector<Index>& block_;
    const BcdProblem& pb_;
    double f_scale_;
    double n_;
    double thr_r_;
    double thr_c_;
};

}  // namespace

CMatrix comm_eigen_directions(const std::vector<std::vector<CMatrix>>& precoded_ul, Index n_streams,
                              Index n_rf, std::mt19937_64& rng) {
    if (precoded_ul.empty()) throw ContractViolation("comm_eigen_directions: no UL users");
    if (n_streams < 1 || n_rf < 1) throw ContractViolation("comm_eigen_directions: bad sizes");
    const Index nr = precoded_ul.front().front().rows();

    std::vector<Candidate> cands;
    for (const auto& per_m : precoded_ul) {
        if (per_m.empty()) throw ContractViolation("comm_eigen_directions: user without subcarriers");
        CMatrix cov = CMatrix::Zero(nr, nr);
        for (const auto& x : per_m) cov.noalias() += x * x.adjoint();
        cov /= static_cast<double>(per_m.size());
        const EigenDecomposition ed = hermitian_eig(hermitian_part(cov));
        for (Index k = 0; k < std::min(n_streams, nr); ++k) cands.push_back({ed.vectors.col(k), ed.values(k)});
    }

    if (static_cast<Index>(cands.size()) > n_rf) {
        std::vector<std::size_t> order(cands.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return cands[a].value > cands[b].value; });
        order.resize(static_cast<std::size_t>(n_rf));
        std::sort(order.begin(), order.end());
        std::vector<Candidate> kept;
        for (auto k : order) kept.push_back(cands[k]);
        cands = std::move(kept);
    }

    const Index base = static_cast<Index>(cands.size());
    CMatrix w(nr, n_rf);
    for (Index r = 0; r < base; ++r) w.col(r) = cands[static_cast<std::size_t>(r)].v;
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (Index r = base; r < n_rf; ++r) {
        CVector coef(base);
        for (Index k = 0; k < base; ++k) coef(k) = cd(gauss(rng), gauss(rng));
        w.col(r) = w.leftCols(base) * coef;
    }
    const double target = std::sqrt(static_cast<double>(nr));
    for (Index r = 0; r < n_rf; ++r) {
        const double n = w.col(r).norm();
        if (n > 0.0) w.col(r) *= target / n;
    }
    return w;
}

InitialCombiner initial_combiner(const CMatrix& w_com, double angle, double kappa2) {
    if (kappa2 < 0.0 || kappa2 > 1.0) throw ContractViolation("initial_combiner: kappa2 outside [0, 1]");
    const Index nr = w_com.rows();
    const CVector a = array_response(nr, angle);
    InitialCombiner out;
    out.w_com = w_com;
    out.w.resize(nr, w_com.cols());
    for (Index r = 0; r < w_com.cols(); ++r) {
        auto c = out.w_com.col(r);
        const cd za = a.dot(c);
        if (std::abs(za) > 0.0) c *= std::conj(za) / std::abs(za);
        CVector col = unit_modulus(kappa2 * c + (1.0 - kappa2) * a);
        const cd zw = col.dot(a);
        if (std::abs(zw) > 0.0) col *= zw / std::abs(zw);
        out.w.col(r) = col;
        const cd zc = col.dot(c);
        if (std::abs(zc) > 0.0) c *= std::conj(zc) / std::abs(zc);
    }
    return out;
}

CMatrix si_quadratic(const CMatrix& si_channel, const std::vector<CMatrix>& precoders) {
    const Index nt = si_channel.cols();
    CMatrix s = CMatrix::Zero(nt, nt);
    for (const auto& f : precoders) {
        if (f.rows() != nt) throw ContractViolation("si_quadratic: precoder rows do not match SI channel");
        s.noalias() += f * f.adjoint();
    }
    return hermitian_part(si_channel * s * si_channel.adjoint());
}

double si_objective(const CMatrix& w, const CMatrix& si_channel, const std::vector<CMatrix>& precoders) {
    const CMatrix x = w.adjoint() * si_channel;
    double acc = 0.0;
    for (const auto& f : precoders) acc += (x * f).squaredNorm();
    return acc;
}

double si_objective(const CMatrix& w, const CMatrix& q) {
    double acc = 0.0;
    const CMatrix qw = q * w;
    for (Index r = 0; r < w.cols(); ++r) acc += w.col(r).dot(qw.col(r)).real();
    return std::max(0.0, acc);
}

double gain_loss_violation(const CMatrix& w, const BcdProblem& pb) {
    const double n = static_cast<double>(w.rows());
    double worst = 0.0;
    for (Index r = 0; r < w.cols(); ++r) {
        worst = std::max(worst, column_loss(w, r, pb.steering) - (n - pb.tau_r));
        worst = std::max(worst, column_loss(w, r, pb.w_com.col(r)) - (n - pb.tau_com));
    }
    return worst;
}

BcdStepResult bcd_step(const CMatrix& w_prev, double prev_objective, const std::vector<Index>& block,
                       const BcdProblem& problem, double slack) {
    if (block.empty()) throw ContractViolation("bcd_step: empty block");
    for (auto idx : block)
        if (idx < 0 || idx >= w_prev.size()) throw ContractViolation("bcd_step: block index out of range");

    BcdStepResult keep{w_prev, prev_objective, false, false};
    const double f_scale = std::max(prev_objective, 1e-300);
    Subproblem sp(w_prev, block, problem, f_scale);
    const CVector x0 = sp.gather();
    const double box = 1.0 + problem.eps1;

    CVector x = x0;
    CVector grad;
    double value = sp.evaluate(x, &grad);
    double eta = 1.0;
    for (int it = 0; it < kInnerIters; ++it) {
        CVector trial;
        double trial_value = value;
        bool moved = false;
        for (int bt = 0; bt < 60; ++bt) {
            trial = project_feasible(x - eta * grad, x0, problem.eps2, box);
            trial_value = sp.evaluate(trial, nullptr);
            const double decrease = grad.dot(trial - x).real();
            if (trial_value <= value + kArmijo * decrease) {
                moved = true;
                break;
            }
            eta *= 0.5;
        }
        if (!moved) break;
        const double step = (trial - x).norm();
        x = trial;
        value = sp.evaluate(x, &grad);
        if (step / eta < kFirstOrderTol) break;
        eta = std::min(eta * 2.0, 1e12);
    }
    sp.scatter(x);

    const double before = gain_loss_violation(w_prev, problem);
    const double n = static_cast<double>(w_prev.rows());
    if (gain_loss_violation(sp.w(), problem) > std::max(1e-3 * n, before)) {
        keep.infeasible = true;
        return keep;
    }

    CMatrix w_next = unit_modulus(sp.w());
    const double obj = si_objective(w_next, problem.q);
    const double after = gain_loss_violation(w_next, problem);
    if (obj <= prev_objective && after <= std::max(before, slack)) return {std::move(w_next), obj, true, false};
    return keep;
}

AnalogCombinerDesign design_analog_combiner(const InitialCombiner& init, const CMatrix& q, double angle,
                                            const CombinerDesignConfig& config, const SiMetricScale& scale,
                                            std::mt19937_64& rng) {
    const Index nr = init.w.rows();
    const Index nrf = init.w.cols();
    if (q.rows() != nr || q.cols() != nr) throw ContractViolation("design_analog_combiner: Q has wrong size");

    BcdProblem pb;
    pb.q = q;
    pb.steering = array_response(nr, angle);
    pb.w_com = init.w_com;
    pb.tau_r = config.tau_r;
    pb.tau_com = config.tau_com;
    pb.eps1 = config.eps1;
    pb.eps2 = config.eps2;
    const double slack = 0.05 * static_cast<double>(nr);

    AnalogCombinerDesign out;
    out.w = init.w;
    out.w_com = init.w_com;
    const double norm_sq = static_cast<double>(nr * nrf);
    auto si_db = [&](double obj) {
        return residual_si_to_noise_db(obj, scale.rho, scale.stream_power, scale.subcarriers, scale.noise, norm_sq);
    };

    double obj = si_objective(out.w, q);
    out.trace.push_back({0, obj, si_db(obj), true, false});

    const Index total = nr * nrf;
    const Index block_size = std::max<Index>(1, static_cast<Index>(std::lround(config.block_fraction * static_cast<double>(total))));
    std::vector<Index> all(static_cast<std::size_t>(total));
    std::iota(all.begin(), all.end(), Index{0});
    std::vector<Index> block(static_cast<std::size_t>(block_size));

    int stable = 0;
    for (int it = 1; it <= config.max_iters; ++it) {
        block.clear();
        std::sample(all.begin(), all.end(), std::back_inserter(block), block_size, rng);
        const BcdStepResult step = bcd_step(out.w, obj, block, pb, slack);
        if (step.infeasible) ++out.infeasible_steps;
        if (step.accepted) {
            ++out.accepted_steps;
            const double rel = obj > 0.0 ? (obj - step.objective) / obj : 0.0;
            stable = rel < config.convergence_tol ? stable + 1 : 0;
            out.w = step.w;
            obj = step.objective;
        }
        out.trace.push_back({it, obj, si_db(obj), step.accepted, step.infeasible});
        if (stable >= kStableSteps) break;
    }
    return out;
}

}  // namespace isac
