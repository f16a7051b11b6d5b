#pragma once

// Jacobi eigen/singular value factorizations at any precision, epsilon
// truncation, and truncated-SVD solves.

#include "frameward/precision.hpp"

#include <optional>

namespace frameward {

/// Descending eigenvalues (Hermitian case) or singular values (rectangular
/// case) with orthonormal vectors.  After truncate(), only the leading
/// rank_kept values take part in solves.
template <class Real>
struct SpectralFactorization {
  RVector<Real> values;  // sigma_1 >= ... >= sigma_N
  CMatrix<Real> V;       // N x N right (eigen) vectors; empty if not computed
  CMatrix<Real> U;       // M x N left vectors, rectangular case only
  long rows = 0;
  long cols = 0;
  int precision_bits = 0;
  bool rectangular = false;
  int sweeps = 0;

  /// Truncation state: values with index >= rank_kept are discarded.
  Real eps = Real(0);
  long rank_kept = 0;

  bool has_vectors() const { return V.size() > 0; }
  Real sigma_max() const { return values.size() ? values(0) : Real(0); }
  Real sigma_min() const { return values.size() ? values(values.size() - 1) : Real(0); }
  /// Smallest kept value, or zero when nothing is kept.
  Real sigma_min_kept() const { return rank_kept > 0 ? values(rank_kept - 1) : Real(0); }
};

/// Householder tridiagonalization + implicit QL ahead of the Jacobi sweeps.
/// Plain cyclic Jacobi converges only linearly on the clustered spectra of
/// Fourier-extension Gram matrices until the off-diagonal part drops below
/// the cluster gaps, which at several hundred bits takes far more than 40
/// sweeps.  automatic: multiprecision real symmetric input with n >= 16.
enum class Precondition { automatic, always, never };

struct JacobiOptions {
  bool vectors = true;
  int max_sweeps = 40;
  Precondition precondition = Precondition::automatic;
};

/// Cyclic two-sided Jacobi on a Hermitian matrix.  Sweeps stop once every
/// off-diagonal magnitude is at most 2^{-bits+8} sigma_1.  Real symmetric
/// input takes a real-arithmetic path and may be preconditioned (see
/// Precondition); without vectors the preconditioned path returns the QL
/// eigenvalues directly.  Throws ConvergenceError after max_sweeps.
template <class Real>
SpectralFactorization<Real> hermitian_eig(const CMatrix<Real>& G, JacobiOptions opts = {});

/// One-sided (Hestenes) Jacobi SVD of an M x N matrix, M >= N.
template <class Real>
SpectralFactorization<Real> rect_svd(const CMatrix<Real>& G, JacobiOptions opts = {});

/// Keep sigma_n > eps, discard sigma_n <= eps.
template <class Real>
SpectralFactorization<Real> truncate(SpectralFactorization<Real> fact, const Real& eps);

template <class Real>
struct RegularizedSolution {
  CVector<Real> x;
  Real eps = Real(0);
  long rank_kept = 0;
  Real sigma_min_kept = Real(0);
  Real sigma_max = Real(0);
};

/// x = sum_{sigma_n > eps} <y, v_n>/sigma_n v_n   (square), or
///     sum_{sigma_n > eps} <y, u_n>/sigma_n v_n   (rectangular).
template <class Real>
RegularizedSolution<Real> solve_regularized(const SpectralFactorization<Real>& fact,
                                            const CVector<Real>& y, const Real& eps);

/// 1/sqrt(smallest kept sigma); zero when nothing is kept.
template <class Real>
Real tsvd_condition_bound(const SpectralFactorization<Real>& fact, const Real& eps);

}  // namespace frameward
