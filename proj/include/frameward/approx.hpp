#pragma once

// Frame approximants: exact and regularized projections, oversampled least
// squares, canonical dual expansions via the frame algorithm, xi-functions
// and L^2 errors.

#include "frameward/gram.hpp"

#include <optional>
#include <string>
#include <vector>

namespace frameward {

enum class Method { exact, tsvd, oversampled, dual, synthesis };

std::string to_string(Method m);

/// sum_n z_n phi_n over index_set(N).
template <class Real>
struct FrameApproximant {
  FrameSpec spec;
  std::vector<FrameIndex> indices;
  CVector<Real> coefficients;
  Method method = Method::synthesis;
  std::optional<double> eps;
  long M = 0;  // rows of the system solved; N unless oversampled
  int precision_bits = 0;
  std::optional<long> rank_kept;

  long N() const { return static_cast<long>(indices.size()); }
  Complex<Real> operator()(const Real& t) const;
  Evaluator<Real> evaluator() const {
    return [this](const Real& t) { return (*this)(t); };
  }
  Real coefficient_norm() const { return coefficients.norm(); }
};

template <class Real>
FrameApproximant<Real> synthesize(const FrameSpec& spec, long N, const CVector<Real>& z);

/// Quadrature tolerance for right-hand sides of exact solves: 2^{-L-32}
/// with L = ceil(log2 kappa) from the forecast, so that the amplification
/// by G_N^{-1} leaves the coefficients accurate.
double exact_rhs_tolerance(const FrameSpec& spec, long N);

/// x = G_N^{-1} y.  Refuses (PrecisionRefusal) when the working precision is
/// below required_bits(spec, N).
template <class Real>
CVector<Real> solve_exact(const GramSystem<Real>& sys);
template <class Real>
CVector<Real> solve_exact(const GramSystem<Real>& sys, const SpectralFactorization<Real>& fact);

/// P_N f.  rhs_tol <= 0 selects exact_rhs_tolerance.
template <class Real>
FrameApproximant<Real> project_exact(const FrameSpec& spec, long N, const TargetFunction& f,
                                     double rhs_tol = 0.0);
template <class Real>
FrameApproximant<Real> project_exact(const GramSystem<Real>& sys,
                                     const SpectralFactorization<Real>& fact);

/// P^eps_N f, truncated eigendecomposition of G_N.
template <class Real>
FrameApproximant<Real> project_tsvd(const FrameSpec& spec, long N, const TargetFunction& f,
                                    double eps, double rhs_tol = 1e-14);
template <class Real>
FrameApproximant<Real> project_tsvd(const GramSystem<Real>& sys,
                                    const SpectralFactorization<Real>& fact, double eps);

/// P^eps_{M,N} f, truncated SVD of the M x N system.
template <class Real>
FrameApproximant<Real> project_oversampled(const FrameSpec& spec, long M, long N,
                                           const TargetFunction& f, double eps,
                                           double rhs_tol = 1e-14);
template <class Real>
FrameApproximant<Real> project_oversampled(const GramSystem<Real>& sys,
                                           const SpectralFactorization<Real>& fact, double eps);

struct FrameAlgorithmOptions {
  /// Richardson step; 0 selects 2/(A+B).
  double relax = 0.0;
  /// Stop once the L^2 norm of an update is at most tol.
  double tol = 1e-13;
  int max_iterations = 500;
  /// Number of frame elements kept in the truncated frame operator; only
  /// the weighted Legendre family truncates (half of them weighted).
  long reference_size = 0;
  /// Quadrature tolerance for <f, psi>.
  double quad_tol = 1e-14;
};

/// S^{-1} f held as alpha f + sum_j c_j psi_j, where psi_j are the frame
/// elements outside the orthonormal basis the family contains.  The frame
/// operator is S = I + sum_j <., psi_j> psi_j on that representation, so the
/// orthonormal part is applied exactly.
struct FrameAlgorithmResult {
  FrameSpec spec;
  TargetFunction f;
  Complex<double> alpha;
  std::vector<FrameIndex> extras;
  CVector<double> c;
  std::vector<double> update_norms;
  int iterations = 0;

  Complex<double> operator()(const double& t) const;
  /// Successive update-norm ratios.
  std::vector<double> contraction() const;
};

FrameAlgorithmResult frame_algorithm_inverse(const FrameSpec& spec, const TargetFunction& f,
                                             const FrameAlgorithmOptions& opts = {});

/// a_n = <S^{-1} f, phi_n>, n in index_set(N).  Fourier extension frames are
/// tight and return <f, phi_n>.  Other families run the frame algorithm
/// with reference size 8N unless opts says otherwise.
CVector<double> dual_coefficients(const FrameSpec& spec, long N, const TargetFunction& f,
                                  FrameAlgorithmOptions opts = {});

FrameApproximant<double> project_dual(const FrameSpec& spec, long N, const TargetFunction& f,
                                      FrameAlgorithmOptions opts = {});

/// xi_n = T_N v_n for the eigenvectors of G_N.
template <class Real>
struct XiBasis {
  FrameSpec spec;
  std::vector<FrameIndex> indices;
  CMatrix<Real> V;
  RVector<Real> sigma;

  long size() const { return V.cols(); }
  Complex<Real> operator()(long n, const Real& t) const;
  void evaluate_all(const Real& t, std::span<Complex<Real>> out) const;
};

template <class Real>
XiBasis<Real> xi_basis(const FrameSpec& spec, const SpectralFactorization<Real>& fact);

/// ||f - approximant|| in L^2(Omega), absolute error <= tol.  The
/// tolerance is raised to the rounding level of the synthesis sum,
/// 64 u max_t(|f| + sum |x_n phi_n|) |Omega|^{1/2}, when that is larger.
/// Coefficient space targets use closed-form sums and zeta tails.
template <class Real>
double error_l2(const TargetFunction& f, const FrameApproximant<Real>& approx, double tol);

}  // namespace frameward
