#include "frameward/regsolve.hpp"

#include "frameward/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace frameward {

namespace {

template <class Real>
Real real_abs(const Real& x) {
  using std::abs;
  return abs(x);
}

template <class S>
struct Traits;

template <class Real>
struct Traits<Complex<Real>> {
  using R = Real;
  static Real abs(const Complex<Real>& z) { return std::abs(z); }
  static Real norm(const Complex<Real>& z) { return std::norm(z); }
  static Complex<Real> conj(const Complex<Real>& z) { return std::conj(z); }
  static Real re(const Complex<Real>& z) { return z.real(); }
};

template <>
struct Traits<double> {
  using R = double;
  static double abs(double x) { return std::abs(x); }
  static double norm(double x) { return x * x; }
  static double conj(double x) { return x; }
  static double re(double x) { return x; }
};

template <>
struct Traits<mpreal> {
  using R = mpreal;
  static mpreal abs(const mpreal& x) { return boost::multiprecision::abs(x); }
  static mpreal norm(const mpreal& x) { return x * x; }
  static mpreal conj(const mpreal& x) { return x; }
  static mpreal re(const mpreal& x) { return x; }
};

/// Plane rotation of two length-n columns:
///   x <- c x - s y,   y <- s x + c y.
template <class S, class Real>
void rotate(S* x, S* y, long n, const Real& c, const Real& s) {
  if constexpr (std::is_same_v<S, mpreal>) {
    mpreal tmp;
    auto* t = tmp.backend().data();
    const auto* cc = c.backend().data();
    const auto* ss = s.backend().data();
    for (long k = 0; k < n; ++k) {
      auto* xk = x[k].backend().data();
      auto* yk = y[k].backend().data();
      mpfr_fmms(t, cc, xk, ss, yk, MPFR_RNDN);
      mpfr_fmma(yk, ss, xk, cc, yk, MPFR_RNDN);
      mpfr_swap(xk, t);
    }
  } else {
    for (long k = 0; k < n; ++k) {
      const S xk = x[k];
      x[k] = c * xk - s * y[k];
      y[k] = s * xk + c * y[k];
    }
  }
}

/// y <- phase * y for a unit phase (real phases are +-1).
template <class S>
void apply_phase(S* y, long n, const S& phase) {
  if constexpr (std::is_same_v<S, double> || std::is_same_v<S, mpreal>) {
    if (phase < 0)
      for (long k = 0; k < n; ++k) y[k] = -y[k];
  } else {
    for (long k = 0; k < n; ++k) y[k] *= phase;
  }
}

/// Rotation parameters that annihilate the (p,q) entry of the 2x2 Hermitian
/// block [[app, r e], [r conj(e), aqq]] (after the phase is moved into the
/// second column).
template <class Real>
void rotation(const Real& app, const Real& aqq, const Real& r, Real& c, Real& s, Real& t) {
  using std::abs;
  using std::sqrt;
  const Real theta = (aqq - app) / (2 * r);
  const Real at = abs(theta);
  if constexpr (!is_multiprecision_v<Real>) {
    if (at > 1e150) {
      t = 1 / (2 * theta);
      c = 1;
      s = t;
      return;
    }
  }
  t = 1 / (at + sqrt(1 + theta * theta));
  if (theta < 0) t = -t;
  c = 1 / sqrt(1 + t * t);
  s = t * c;
}

template <class S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

template <class S>
S unit_phase(const S& a, const typename Traits<S>::R& r) {
  return a / r;
}

template <class Real>
void sort_descending(SpectralFactorization<Real>& f, std::vector<Real> vals, const CMatrix<Real>* V,
                     const CMatrix<Real>* U) {
  const long n = static_cast<long>(vals.size());
  std::vector<long> order(n);
  std::iota(order.begin(), order.end(), 0L);
  std::stable_sort(order.begin(), order.end(), [&](long a, long b) { return vals[a] > vals[b]; });
  f.values.resize(n);
  for (long i = 0; i < n; ++i) f.values(i) = vals[order[i]];
  if (V) {
    f.V.resize(V->rows(), n);
    for (long i = 0; i < n; ++i) f.V.col(i) = V->col(order[i]);
  }
  if (U) {
    f.U.resize(U->rows(), n);
    for (long i = 0; i < n; ++i) f.U.col(i) = U->col(order[i]);
  }
}

template <class S>
Mat<S> identity(long n) {
  using R = typename Traits<S>::R;
  Mat<S> I(n, n);
  for (long j = 0; j < n; ++j)
    for (long i = 0; i < n; ++i) I(i, j) = S(R(i == j ? 1 : 0));
  return I;
}

template <class Real>
CMatrix<Real> to_complex(const RMatrix<Real>& A) {
  CMatrix<Real> C(A.rows(), A.cols());
  for (long j = 0; j < A.cols(); ++j)
    for (long i = 0; i < A.rows(); ++i) C(i, j) = Complex<Real>(A(i, j), Real(0));
  return C;
}

template <class Real>
CMatrix<Real> to_complex(const CMatrix<Real>& A) {
  return A;
}

/// Two-sided cyclic Jacobi on a Hermitian matrix with scalar S.
template <class S>
void jacobi_hermitian(Mat<S>& A, Mat<S>* V, int max_sweeps, int& sweeps_done) {
  using R = typename Traits<S>::R;
  using T = Traits<S>;
  const long n = A.rows();
  const R tol = pow2<R>(-effective_bits<R>() + 8);
  R c, s, t;
  for (int sweep = 0;; ++sweep) {
    R scale(0), off(0);
    for (long i = 0; i < n; ++i) scale = std::max(scale, real_abs(T::re(A(i, i))));
    for (long q = 1; q < n; ++q)
      for (long p = 0; p < q; ++p) off = std::max(off, T::abs(A(p, q)));
    if (off <= tol * scale || off == 0) {
      sweeps_done = sweep;
      return;
    }
    if (sweep == max_sweeps) {
      std::ostringstream os;
      os << "Jacobi eigensolver did not converge in " << max_sweeps << " sweeps (n=" << n
         << ", off-diagonal/scale=" << to_double(R(off / scale)) << ")";
      throw ConvergenceError(os.str(), sweep, to_double(R(off / scale)));
    }
    const R thresh = tol * scale;
    for (long p = 0; p + 1 < n; ++p) {
      for (long q = p + 1; q < n; ++q) {
        const S apq = A(p, q);
        const R r = T::abs(apq);
        if (r <= thresh) continue;
        const R app = T::re(A(p, p)), aqq = T::re(A(q, q));
        rotation(app, aqq, r, c, s, t);
        // Column q <- conj(e) column q makes the (p,q) entry real and positive.
        const S e = unit_phase(apq, r);
        const S ebar = T::conj(e);
        apply_phase(A.col(q).data(), n, ebar);
        rotate(A.col(p).data(), A.col(q).data(), n, c, s);
        if (V) {
          apply_phase(V->col(q).data(), n, ebar);
          rotate(V->col(p).data(), V->col(q).data(), n, c, s);
        }
        for (long k = 0; k < n; ++k) {
          A(p, k) = T::conj(A(k, p));
          A(q, k) = T::conj(A(k, q));
        }
        A(p, p) = S(R(app - t * r));
        A(q, q) = S(R(aqq + t * r));
        A(p, q) = S(R(0));
        A(q, p) = S(R(0));
      }
    }
  }
}

/// One-sided Hestenes Jacobi: orthogonalize the columns of W, accumulating
/// the rotations in V.
template <class S>
void jacobi_one_sided(Mat<S>& W, Mat<S>* V, int max_sweeps, int& sweeps_done) {
  using R = typename Traits<S>::R;
  using T = Traits<S>;
  using std::sqrt;
  const long m = W.rows(), n = W.cols();
  const R tol = pow2<R>(-effective_bits<R>() + 8);
  R c, s, t;
  for (int sweep = 0;; ++sweep) {
    bool rotated = false;
    R worst(0);
    for (long p = 0; p + 1 < n; ++p) {
      for (long q = p + 1; q < n; ++q) {
        R alpha(0), beta(0);
        S gamma = S(R(0));
        const S* wp = W.col(p).data();
        const S* wq = W.col(q).data();
        for (long k = 0; k < m; ++k) {
          alpha += T::norm(wp[k]);
          beta += T::norm(wq[k]);
          gamma += T::conj(wp[k]) * wq[k];
        }
        const R g = T::abs(gamma);
        if (g == 0 || alpha == 0 || beta == 0) continue;
        const R ratio = g / sqrt(alpha * beta);
        worst = std::max(worst, ratio);
        if (ratio <= tol) continue;
        if (sweep == max_sweeps) continue;
        rotated = true;
        rotation(alpha, beta, g, c, s, t);
        const S ebar = T::conj(unit_phase(gamma, g));
        apply_phase(W.col(q).data(), m, ebar);
        rotate(W.col(p).data(), W.col(q).data(), m, c, s);
        if (V) {
          apply_phase(V->col(q).data(), n, ebar);
          rotate(V->col(p).data(), V->col(q).data(), n, c, s);
        }
      }
    }
    if (!rotated) {
      if (worst > tol) {
        std::ostringstream os;
        os << "one-sided Jacobi SVD did not converge in " << max_sweeps << " sweeps (" << m << "x"
           << n << ", column coupling=" << to_double(worst) << ")";
        throw ConvergenceError(os.str(), sweep, to_double(worst));
      }
      sweeps_done = sweep;
      return;
    }
  }
}

template <class Real>
bool is_real_matrix(const CMatrix<Real>& G) {
  for (long j = 0; j < G.cols(); ++j)
    for (long i = 0; i < G.rows(); ++i)
      if (G(i, j).imag() != 0) return false;
  return true;
}

template <class Real>
RMatrix<Real> real_part(const CMatrix<Real>& G) {
  RMatrix<Real> A(G.rows(), G.cols());
  for (long j = 0; j < G.cols(); ++j)
    for (long i = 0; i < G.rows(); ++i) A(i, j) = G(i, j).real();
  return A;
}

template <class Real>
Real hypot_(const Real& a, const Real& b) {
  using std::sqrt;
  if constexpr (is_multiprecision_v<Real>)
    return sqrt(a * a + b * b);
  else
    return std::hypot(a, b);
}

/// Householder reduction to tridiagonal form followed by implicit QL with
/// shifts.  On return d holds the eigenvalues and, with vectors, A holds
/// the eigenvectors as columns.
template <class Real>
void tridiagonal_ql(Mat<Real>& a, bool vectors, std::vector<Real>& d) {
  using std::abs;
  using std::sqrt;
  const long n = a.rows();
  d.assign(n, Real(0));
  std::vector<Real> e(n, Real(0));
  for (long i = n - 1; i > 0; --i) {
    const long l = i - 1;
    Real h(0), scale(0);
    if (l > 0) {
      for (long k = 0; k < i; ++k) scale += abs(a(i, k));
      if (scale == 0) {
        e[i] = a(i, l);
      } else {
        for (long k = 0; k < i; ++k) {
          a(i, k) /= scale;
          h += a(i, k) * a(i, k);
        }
        Real f = a(i, l);
        Real g = f >= 0 ? Real(-sqrt(h)) : Real(sqrt(h));
        e[i] = scale * g;
        h -= f * g;
        a(i, l) = f - g;
        f = 0;
        for (long j = 0; j < i; ++j) {
          if (vectors) a(j, i) = a(i, j) / h;
          g = 0;
          for (long k = 0; k < j + 1; ++k) g += a(j, k) * a(i, k);
          for (long k = j + 1; k < i; ++k) g += a(k, j) * a(i, k);
          e[j] = g / h;
          f += e[j] * a(i, j);
        }
        const Real hh = f / (h + h);
        for (long j = 0; j < i; ++j) {
          f = a(i, j);
          e[j] = g = e[j] - hh * f;
          for (long k = 0; k < j + 1; ++k) a(j, k) -= (f * e[k] + g * a(i, k));
        }
      }
    } else {
      e[i] = a(i, l);
    }
    d[i] = h;
  }
  if (vectors) d[0] = 0;
  e[0] = 0;
  for (long i = 0; i < n; ++i) {
    if (vectors) {
      if (d[i] != 0) {
        for (long j = 0; j < i; ++j) {
          Real g(0);
          for (long k = 0; k < i; ++k) g += a(i, k) * a(k, j);
          for (long k = 0; k < i; ++k) a(k, j) -= g * a(k, i);
        }
      }
      d[i] = a(i, i);
      a(i, i) = 1;
      for (long j = 0; j < i; ++j) a(j, i) = a(i, j) = 0;
    } else {
      d[i] = a(i, i);
    }
  }

  const Real eps = pow2<Real>(-effective_bits<Real>());
  for (long i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0;
  constexpr int kMaxIter = 60;
  for (long l = 0; l < n; ++l) {
    int iter = 0;
    long m;
    do {
      for (m = l; m < n - 1; ++m) {
        const Real dd = abs(d[m]) + abs(d[m + 1]);
        if (abs(e[m]) <= eps * dd) break;
      }
      if (m != l) {
        if (iter++ == kMaxIter) {
          std::ostringstream os;
          os << "tridiagonal QL did not converge (n=" << n << ", index " << l << ")";
          throw ConvergenceError(os.str(), iter, to_double(abs(e[l])));
        }
        Real g = (d[l + 1] - d[l]) / (2 * e[l]);
        Real r = hypot_(g, Real(1));
        g = d[m] - d[l] + e[l] / (g + (g >= 0 ? abs(r) : Real(-abs(r))));
        Real s(1), c(1), p(0);
        long i;
        for (i = m - 1; i >= l; --i) {
          Real f = s * e[i];
          const Real b = c * e[i];
          e[i + 1] = (r = hypot_(f, g));
          if (r == 0) {
            d[i + 1] -= p;
            e[m] = 0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2 * c * b;
          d[i + 1] = g + (p = s * r);
          g = c * r - b;
          // columns i, i+1:  z_i <- c z_i - s z_{i+1},  z_{i+1} <- s z_i + c z_{i+1}
          if (vectors) rotate(a.col(i).data(), a.col(i + 1).data(), n, c, s);
        }
        if (r == 0 && i >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0;
      }
    } while (m != l);
  }
}

template <class S>
bool use_preconditioner(long n, const JacobiOptions& opts) {
  switch (opts.precondition) {
    case Precondition::always: return n > 1;
    case Precondition::never: return false;
    case Precondition::automatic: break;
  }
  return std::is_same_v<S, mpreal> && n >= 16;
}

template <class Real, class S>
SpectralFactorization<Real> hermitian_impl(Mat<S> A, const JacobiOptions& opts) {
  using T = Traits<S>;
  const long n = A.rows();
  SpectralFactorization<Real> f;
  f.rows = f.cols = n;
  f.precision_bits = effective_bits<Real>();
  Mat<S> V;
  if constexpr (std::is_same_v<S, Real>) {
    if (use_preconditioner<S>(n, opts)) {
      Mat<Real> Z = A;
      std::vector<Real> d;
      tridiagonal_ql<Real>(Z, opts.vectors, d);
      if (!opts.vectors) {
        sort_descending<Real>(f, d, nullptr, nullptr);
        f.rank_kept = n;
        return f;
      }
      // Finish with Jacobi on the nearly diagonal Z^T A Z.
      Mat<Real> B = Z.transpose() * A * Z;
      for (long j = 0; j < n; ++j)
        for (long i = 0; i < j; ++i) B(i, j) = B(j, i) = (B(i, j) + B(j, i)) / 2;
      V = identity<Real>(n);
      jacobi_hermitian<Real>(B, &V, opts.max_sweeps, f.sweeps);
      V = Z * V;
      A = std::move(B);
      std::vector<Real> vals(n);
      for (long i = 0; i < n; ++i) vals[i] = A(i, i);
      CMatrix<Real> Vc = to_complex<Real>(V);
      sort_descending<Real>(f, vals, &Vc, nullptr);
      f.rank_kept = n;
      return f;
    }
  }
  if (opts.vectors) V = identity<S>(n);
  jacobi_hermitian<S>(A, opts.vectors ? &V : nullptr, opts.max_sweeps, f.sweeps);
  std::vector<Real> vals(n);
  for (long i = 0; i < n; ++i) vals[i] = T::re(A(i, i));
  CMatrix<Real> Vc;
  if (opts.vectors) Vc = to_complex<Real>(V);
  sort_descending<Real>(f, vals, opts.vectors ? &Vc : nullptr, nullptr);
  f.rank_kept = n;
  return f;
}

template <class Real, class S>
SpectralFactorization<Real> rect_impl(Mat<S> W, const JacobiOptions& opts) {
  using T = Traits<S>;
  using std::sqrt;
  const long m = W.rows(), n = W.cols();
  SpectralFactorization<Real> f;
  f.rows = m;
  f.cols = n;
  f.rectangular = true;
  f.precision_bits = effective_bits<Real>();
  Mat<S> V;
  if (opts.vectors) V = identity<S>(n);
  jacobi_one_sided<S>(W, opts.vectors ? &V : nullptr, opts.max_sweeps, f.sweeps);
  std::vector<Real> vals(n);
  for (long j = 0; j < n; ++j) {
    Real s2(0);
    for (long k = 0; k < m; ++k) s2 += T::norm(W(k, j));
    vals[j] = sqrt(s2);
  }
  CMatrix<Real> Uc, Vc;
  if (opts.vectors) {
    Uc = to_complex<Real>(W);
    for (long j = 0; j < n; ++j)
      if (vals[j] > 0) Uc.col(j) /= Complex<Real>(vals[j], Real(0));
    Vc = to_complex<Real>(V);
  }
  sort_descending<Real>(f, vals, opts.vectors ? &Vc : nullptr, opts.vectors ? &Uc : nullptr);
  f.rank_kept = n;
  return f;
}

}  // namespace

template <class Real>
SpectralFactorization<Real> hermitian_eig(const CMatrix<Real>& G, JacobiOptions opts) {
  if (G.rows() != G.cols()) throw InvalidArgument("hermitian_eig: matrix must be square");
  for (long j = 0; j < G.cols(); ++j)
    for (long i = 0; i <= j; ++i)
      if (G(i, j) != std::conj(G(j, i)))
        throw InvalidArgument("hermitian_eig: matrix is not Hermitian");
  if (is_real_matrix(G)) return hermitian_impl<Real, Real>(real_part(G), opts);
  return hermitian_impl<Real, Complex<Real>>(G, opts);
}

template <class Real>
SpectralFactorization<Real> rect_svd(const CMatrix<Real>& G, JacobiOptions opts) {
  if (G.rows() < G.cols()) throw InvalidArgument("rect_svd: needs rows >= cols");
  if (is_real_matrix(G)) return rect_impl<Real, Real>(real_part(G), opts);
  return rect_impl<Real, Complex<Real>>(G, opts);
}

template <class Real>
SpectralFactorization<Real> truncate(SpectralFactorization<Real> fact, const Real& eps) {
  if (eps < 0) throw InvalidArgument("truncate: eps must be >= 0");
  long kept = 0;
  while (kept < fact.values.size() && fact.values(kept) > eps) ++kept;
  fact.eps = eps;
  fact.rank_kept = kept;
  return fact;
}

template <class Real>
RegularizedSolution<Real> solve_regularized(const SpectralFactorization<Real>& fact,
                                            const CVector<Real>& y, const Real& eps) {
  if (!fact.has_vectors()) throw InvalidArgument("solve_regularized: factorization has no vectors");
  if (y.size() != fact.rows)
    throw InvalidArgument("solve_regularized: rhs length " + std::to_string(y.size()) +
                          " does not match " + std::to_string(fact.rows) + " rows");
  const auto t = truncate(fact, eps);
  RegularizedSolution<Real> sol;
  sol.eps = eps;
  sol.rank_kept = t.rank_kept;
  sol.sigma_min_kept = t.sigma_min_kept();
  sol.sigma_max = t.sigma_max();
  sol.x = CVector<Real>::Constant(fact.cols, Complex<Real>(Real(0), Real(0)));
  const CMatrix<Real>& L = fact.rectangular ? fact.U : fact.V;
  for (long n = 0; n < t.rank_kept; ++n) {
    const Complex<Real> coeff = L.col(n).dot(y) / fact.values(n);  // dot conjugates the left side
    sol.x += coeff * fact.V.col(n);
  }
  return sol;
}

template <class Real>
Real tsvd_condition_bound(const SpectralFactorization<Real>& fact, const Real& eps) {
  using std::sqrt;
  const auto t = truncate(fact, eps);
  if (t.rank_kept == 0) return Real(0);
  return 1 / sqrt(t.sigma_min_kept());
}

#define FRAMEWARD_INSTANTIATE(Real)                                                            \
  template SpectralFactorization<Real> hermitian_eig<Real>(const CMatrix<Real>&, JacobiOptions); \
  template SpectralFactorization<Real> rect_svd<Real>(const CMatrix<Real>&, JacobiOptions);     \
  template SpectralFactorization<Real> truncate<Real>(SpectralFactorization<Real>, const Real&); \
  template RegularizedSolution<Real> solve_regularized<Real>(const SpectralFactorization<Real>&, \
                                                             const CVector<Real>&, const Real&); \
  template Real tsvd_condition_bound<Real>(const SpectralFactorization<Real>&, const Real&);

FRAMEWARD_INSTANTIATE(double)
FRAMEWARD_INSTANTIATE(mpreal)

#undef FRAMEWARD_INSTANTIATE

}  // namespace frameward
