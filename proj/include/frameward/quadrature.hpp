#pragma once

// Gauss-Legendre / Gauss-Jacobi rules at arbitrary precision and adaptive
// composite integration.

#include "frameward/frames.hpp"
#include "frameward/precision.hpp"

#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace frameward {

enum class RuleKind { legendre, jacobi };

/// Gauss rule on (-1,1) for the weight (1-t)^alpha (1+t)^beta.
template <class Real>
struct QuadRule {
  std::vector<Real> nodes;    // strictly increasing
  std::vector<Real> weights;  // positive
  RuleKind kind = RuleKind::legendre;
  double alpha = 0.0;
  double beta = 0.0;

  int count() const { return static_cast<int>(nodes.size()); }
};

/// n-point Gauss-Legendre rule at the working precision of Real.  Nodes
/// are refined by Newton iteration on P_n until the step is below
/// 2^{-bits+4}.
template <class Real>
QuadRule<Real> gauss_legendre(int n);

/// n-point Gauss-Jacobi rule for (1-t)^alpha (1+t)^beta, alpha, beta > -1.
template <class Real>
QuadRule<Real> gauss_jacobi(int n, double alpha, double beta);

/// Memoized rules keyed by (kind, n, alpha, beta, bits).  Thread-safe.
template <class Real>
std::shared_ptr<const QuadRule<Real>> cached_gauss_legendre(int n);
template <class Real>
std::shared_ptr<const QuadRule<Real>> cached_gauss_jacobi(int n, double alpha, double beta);

struct AdaptiveOptions {
  /// Absolute tolerance on the (max-norm) integral error.
  double abs_tol = 1e-14;
  /// Relative floor: accept once the estimate is below rel_tol * |I|.
  /// Zero disables the floor.
  double rel_tol = 0.0;
  /// For integrals of |g|^2: also accept once the estimate is below
  /// sqrt_tol * sqrt|I|, which bounds the error of ||g|| by sqrt_tol / 2.
  double sqrt_tol = 0.0;
  int max_panels = 1 << 16;
  /// Grade the initial panels geometrically toward the left endpoint
  /// (ratio 1/2, 40 levels), for integrands like (1+t)^alpha.
  bool graded_left = false;
  /// Interior points that must be panel boundaries.
  std::vector<double> breakpoints;
};

template <class Real>
struct AdaptiveResult {
  std::vector<Complex<Real>> values;
  double error_estimate = 0.0;
  int panels = 0;
};

/// Vector integrand: writes dim complex values at t.
template <class Real>
using VectorIntegrand = std::function<void(const Real& t, std::span<Complex<Real>> out)>;

/// Low order of the panel rule pair at a given working precision: 24 up to
/// 96 bits, then about bits/4 (rounded up to a multiple of 8).  With a fixed
/// 24-point pair, tolerances near 2^{-400} would need thousands of panels.
int adaptive_panel_order(int bits);

/// Adaptive composite Gauss-Legendre integration of a vector-valued
/// integrand over [lo, hi].  Each panel is integrated with n and 2n nodes,
/// n = adaptive_panel_order; their difference is the panel error.  The panel with the largest error is
/// bisected until the summed error meets the tolerance.  The tolerance is
/// floored at the rounding level 32 u sum_p |I_p| of the working precision.
/// Throws AccuracyFailure when the panel budget runs out.
template <class Real>
AdaptiveResult<Real> integrate_adaptive(const VectorIntegrand<Real>& f, int dim, const Real& lo,
                                        const Real& hi, const AdaptiveOptions& opts);

/// Scalar real integrand version.
template <class Real>
Real integrate_real(const std::function<Real(const Real&)>& f, const Real& lo, const Real& hi,
                    const AdaptiveOptions& opts);

/// Pointwise complex function on the domain.
template <class Real>
using Evaluator = std::function<Complex<Real>(const Real&)>;

/// int_Omega f(t) conj(phi(t)) dt with error <= tol.
template <class Real>
Complex<Real> integrate_against(const Evaluator<Real>& f, const Evaluator<Real>& phi,
                                const Interval& omega, double tol,
                                const AdaptiveOptions& base = {});

/// ||g||_{L^2(Omega)} with absolute error <= tol (up to the rounding floor
/// of integrate_adaptive).
template <class Real>
Real l2_norm(const Evaluator<Real>& g, const Interval& omega, double tol,
             const AdaptiveOptions& base = {});

/// Composite Gauss-Legendre grid on an interval (nodes and weights).
template <class Real>
struct CompositeGrid {
  std::vector<Real> nodes;
  std::vector<Real> weights;
};

/// panels x order nodes; with graded_left the first panels shrink
/// geometrically toward the left end.
template <class Real>
CompositeGrid<Real> composite_grid(const Interval& omega, int panels, int order, bool graded_left);

}  // namespace frameward
