#pragma once

// Truncated Gram systems G_{M,N} (entry (m,n) = <phi_n, phi_m>), right-hand
// sides y_m = <f, phi_m>, frame bounds and the precision rule.

#include "frameward/frames.hpp"
#include "frameward/regsolve.hpp"
#include "frameward/targets.hpp"

#include <iosfwd>
#include <optional>
#include <vector>

namespace frameward {

template <class Real>
struct GramSystem {
  FrameSpec spec;
  std::vector<FrameIndex> rows;  // index_set(M)
  std::vector<FrameIndex> cols;  // index_set(N)
  CMatrix<Real> matrix;          // M x N
  std::optional<CVector<Real>> rhs;
  int precision_bits = 0;

  long M() const { return static_cast<long>(rows.size()); }
  long N() const { return static_cast<long>(cols.size()); }
  bool square() const { return rows.size() == cols.size(); }
};

/// Hermitian N x N Gram matrix at the working precision of Real.
template <class Real>
GramSystem<Real> assemble_square(const FrameSpec& spec, long N);

/// M x N Gram matrix; rows index_set(M), columns index_set(N), M >= N.
template <class Real>
GramSystem<Real> assemble_rect(const FrameSpec& spec, long M, long N);

/// Attach y_m = <f, phi_m> computed to absolute tolerance tol per entry.
/// Coefficient-space targets are handled with closed-form l^2 sums.
template <class Real>
GramSystem<Real> bind_target(GramSystem<Real> sys, const TargetFunction& f, double tol);

/// Analysis coefficients <f, phi> for an arbitrary index list.
template <class Real>
CVector<Real> analysis(const FrameSpec& spec, const std::vector<FrameIndex>& indices,
                       const TargetFunction& f, double tol);

struct FrameBounds {
  double A = 0.0;
  double B = 0.0;
  double kappa() const { return B / A; }
};

/// Extreme eigenvalues of a square Gram system.
template <class Real>
FrameBounds frame_bounds(const GramSystem<Real>& sys);
template <class Real>
FrameBounds frame_bounds(const SpectralFactorization<Real>& fact);

/// log2 of the forecast condition number of G_N from the family's growth
/// law: E(T)^N with E(T) = cot^2(pi/(4T)); N^{2K-1}; 4^N; and the exact
/// (1+r)/(1-r) for the augmented orthonormal frame.
double forecast_log2_kappa(const FrameSpec& spec, long N);

/// Bits for exact-projection work at truncation N: 64 + 2 ceil(log2 kappa).
int required_bits(const FrameSpec& spec, long N);

/// Plain-text dump, one "row col re im" line per entry.
template <class Real>
void dump_matrix(const GramSystem<Real>& sys, std::ostream& os);

}  // namespace frameward
