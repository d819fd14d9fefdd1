// SPDX-License-Identifier: Apache-2.0
#include "isac/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "isac/errors.hpp"

namespace isac {

namespace {

thread_local std::size_t t_cholesky_calls = 0;

// Plain left-looking Cholesky; returns the failing pivot index on breakdown.
std::optional<std::size_t> try_cholesky(const CMatrix& a, CMatrix& l, double pivot_floor) {
    const Index n = a.rows();
    l.setZero(n, n);
    for (Index j = 0; j < n; ++j) {
        cd acc = a(j, j);
        for (Index k = 0; k < j; ++k) acc -= l(j, k) * std::conj(l(j, k));
        const double pivot = acc.real();
        if (!(pivot > pivot_floor)) return static_cast<std::size_t>(j);
        const double d = std::sqrt(pivot);
        l(j, j) = d;
        for (Index i = j + 1; i < n; ++i) {
            cd s = a(i, j);
            for (Index k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
            l(i, j) = s / d;
        }
    }
    return std::nullopt;
}

void sort_descending(EigenDecomposition& ed) {
    const Index n = ed.values.size();
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index x, Index y) { return ed.values(x) > ed.values(y); });
    RVector values(n);
    CMatrix vectors(ed.vectors.rows(), n);
    for (Index k = 0; k < n; ++k) {
        values(k) = ed.values(order[static_cast<std::size_t>(k)]);
        vectors.col(k) = ed.vectors.col(order[static_cast<std::size_t>(k)]);
    }
    ed.values = std::move(values);
    ed.vectors = std::move(vectors);
}

}  // namespace

void require_finite(const CMatrix& a, std::string_view what) {
    if (!a.allFinite()) throw ContractViolation(std::string(what) + ": non-finite entry");
}

bool is_hermitian(const CMatrix& a, double tol) {
    if (a.rows() != a.cols()) return false;
    const double scale = std::max(1.0, a.norm());
    return (a - a.adjoint()).norm() <= tol * scale;
}

CMatrix hermitian_part(const CMatrix& a) { return 0.5 * (a + a.adjoint()); }

CMatrix cholesky(const CMatrix& a) {
    ++t_cholesky_calls;
    if (a.rows() != a.cols()) throw ContractViolation("cholesky: matrix not square");
    require_finite(a, "cholesky");
    if (!is_hermitian(a)) throw ContractViolation("cholesky: matrix not Hermitian");
    const Index n = a.rows();
    if (n == 0) return CMatrix(0, 0);

    const double max_diag = a.diagonal().real().cwiseAbs().maxCoeff();
    const double floor = 1e-14 * max_diag;
    CMatrix l;
    auto failed = try_cholesky(a, l, floor);
    if (!failed) return l;

    const double trace = a.diagonal().real().sum();
    const double jitter = 1e-12 * std::abs(trace) / static_cast<double>(n);
    CMatrix shifted = a;
    shifted.diagonal().array() += jitter;
    failed = try_cholesky(shifted, l, floor);
    if (failed) throw DecompositionFailure("cholesky: matrix not positive definite", *failed);
    return l;
}

std::size_t cholesky_call_count() { return t_cholesky_calls; }

EigenDecomposition hermitian_eig(const CMatrix& a) {
    if (a.rows() != a.cols()) throw ContractViolation("hermitian_eig: matrix not square");
    require_finite(a, "hermitian_eig");
    if (!is_hermitian(a)) throw ContractViolation("hermitian_eig: matrix not Hermitian");
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_part(a));
    if (solver.info() != Eigen::Success) throw Error("hermitian_eig: solver did not converge");
    // Eigen returns ascending order; flip before the stable sort so equal
    // eigenvalues keep the solver's relative ordering.
    EigenDecomposition ed{solver.eigenvalues(), solver.eigenvectors()};
    sort_descending(ed);
    return ed;
}

EigenDecomposition generalized_hermitian_eig(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
        throw ContractViolation("generalized_hermitian_eig: dimension mismatch");
    require_finite(a, "generalized_hermitian_eig");
    if (!is_hermitian(a)) throw ContractViolation("generalized_hermitian_eig: A not Hermitian");

    const CMatrix l = cholesky(b);
    // C = L^-1 A L^-H
    const CMatrix linv_a = lower_solve(l, a);
    const CMatrix c = lower_solve(l, linv_a.adjoint()).adjoint();
    EigenDecomposition ed = hermitian_eig(hermitian_part(c));
    // v = L^-H u
    CMatrix v = l.adjoint().triangularView<Eigen::Upper>().solve(ed.vectors);
    for (Index k = 0; k < v.cols(); ++k) {
        const double nrm = v.col(k).norm();
        if (nrm > 0.0) v.col(k) /= nrm;
    }
    ed.vectors = std::move(v);
    return ed;
}

SvdResult svd(const CMatrix& a) {
    require_finite(a, "svd");
    Eigen::JacobiSVD<CMatrix> solver(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return {solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

CMatrix lower_solve(const CMatrix& l, const CMatrix& b) {
    return l.triangularView<Eigen::Lower>().solve(b);
}

CMatrix unit_modulus(const CMatrix& a) {
    CMatrix out(a.rows(), a.cols());
    for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i) {
            const double mag = std::abs(a(i, j));
            out(i, j) = mag > 0.0 ? a(i, j) / mag : cd(1.0, 0.0);
        }
    return out;
}

CMatrix range_doppler_transform(const CMatrix& x, Index range_len, Index doppler_len) {
    if (range_len < x.rows() || doppler_len < x.cols())
        throw ContractViolation("range_doppler_transform: transform shorter than data");
    require_finite(x, "range_doppler_transform");

    Eigen::FFT<double> fft;
    fft.SetFlag(Eigen::FFT<double>::Unscaled);

    // Forward DFT along each row (symbol axis).
    CMatrix rows_done(x.rows(), doppler_len);
    std::vector<cd> in(static_cast<std::size_t>(doppler_len));
    std::vector<cd> out;
    for (Index m = 0; m < x.rows(); ++m) {
        std::fill(in.begin(), in.end(), cd(0.0, 0.0));
        for (Index n = 0; n < x.cols(); ++n) in[static_cast<std::size_t>(n)] = x(m, n);
        fft.fwd(out, in);
        for (Index k = 0; k < doppler_len; ++k) rows_done(m, k) = out[static_cast<std::size_t>(k)];
    }

    // Unscaled inverse DFT down each column (subcarrier axis).
    CMatrix result(range_len, doppler_len);
    in.assign(static_cast<std::size_t>(range_len), cd(0.0, 0.0));
    for (Index k = 0; k < doppler_len; ++k) {
        std::fill(in.begin(), in.end(), cd(0.0, 0.0));
        for (Index m = 0; m < x.rows(); ++m) in[static_cast<std::size_t>(m)] = rows_done(m, k);
        fft.inv(out, in);
        for (Index m = 0; m < range_len; ++m) result(m, k) = out[static_cast<std::size_t>(m)];
    }
    return result;
}

}  // namespace isac
