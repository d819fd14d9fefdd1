// SPDX-License-Identifier: Apache-2.0
//
// Dense complex linear algebra and 2-D transform kernels shared by every
// stage of the simulator. Eigen provides storage and the symmetric
// eigen/SVD solvers; the wrappers here pin ordering, tolerances and the
// error contract the rest of the library relies on.
#pragma once

#include <complex>
#include <cstddef>
#include <string_view>

#include <Eigen/Dense>

namespace isac {

using cd = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kPi = 3.14159265358979323846;

/// Throws ContractViolation if any entry is NaN or infinite.
void require_finite(const CMatrix& a, std::string_view what);

/// True when ||A - A^H||_F <= tol * max(1, ||A||_F).
bool is_hermitian(const CMatrix& a, double tol = 1e-10);

/// Returns (A + A^H)/2.
CMatrix hermitian_part(const CMatrix& a);

/// Lower-triangular Cholesky factor of a Hermitian positive-definite matrix.
///
/// If a pivot falls below 1e-14 times the largest diagonal entry, the
/// factorization is retried once on A + 1e-12 * trace(A)/n * I. A second
/// failure throws DecompositionFailure carrying the offending pivot index.
/// Every call bumps a per-thread counter (see cholesky_call_count).
CMatrix cholesky(const CMatrix& a);

/// Number of cholesky() calls made on the current thread.
std::size_t cholesky_call_count();

struct EigenDecomposition {
    RVector values;   // descending
    CMatrix vectors;  // matching columns
};

/// Eigen-decomposition of a Hermitian matrix, eigenvalues descending with
/// ties kept in solver order. Non-Hermitian input is a ContractViolation.
EigenDecomposition hermitian_eig(const CMatrix& a);

/// Solves A v = lambda B v for Hermitian A and Hermitian positive-definite B
/// by whitening with the Cholesky factor of B. Eigenvectors are scaled to
/// unit Euclidean norm; eigenvalues descend.
EigenDecomposition generalized_hermitian_eig(const CMatrix& a, const CMatrix& b);

struct SvdResult {
    CMatrix u;                // rows x k, orthonormal columns
    RVector singular_values;  // k = min(rows, cols), descending
    CMatrix v;                // cols x k, orthonormal columns
};

SvdResult svd(const CMatrix& a);

/// Zero-padded 2-D transform used to build range-Doppler maps:
///
///   out(mt, nt) = sum_m sum_n x(m, n) exp(+j2pi m mt / range_len)
///                                     exp(-j2pi n nt / doppler_len)
///
/// i.e. an unscaled inverse DFT down each column (subcarrier axis) and an
/// unscaled forward DFT along each row (symbol axis). A tone
/// exp(-j2pi m m0/range_len) exp(+j2pi n n0/doppler_len) peaks at (m0, n0).
CMatrix range_doppler_transform(const CMatrix& x, Index range_len, Index doppler_len);

/// Solves L X = B for lower-triangular L.
CMatrix lower_solve(const CMatrix& l, const CMatrix& b);

/// Entrywise projection onto the unit circle; exact zeros map to 1.
CMatrix unit_modulus(const CMatrix& a);

}  // namespace isac
