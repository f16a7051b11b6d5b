#include <doctest.h>

#include "frameward/errors.hpp"
#include "frameward/gram.hpp"
#include "frameward/regsolve.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace frameward;

namespace {

using CMat = CMatrix<double>;
using CVec = CVector<double>;

CMat random_hermitian(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMat A(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= j; ++i) {
      A(i, j) = i == j ? Complex<double>(g(rng), 0.0) : Complex<double>(g(rng), g(rng));
      A(j, i) = std::conj(A(i, j));
    }
  return A;
}

// Number of eigenvalues below x, from the inertia of A - xI (Sylvester),
// using complex LDL* without pivoting in long double.
int count_below(const CMat& A, long double x) {
  const int n = static_cast<int>(A.rows());
  using LC = std::complex<long double>;
  std::vector<std::vector<LC>> M(n, std::vector<LC>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      M[i][j] = LC(A(i, j).real(), A(i, j).imag()) - (i == j ? LC(x) : LC(0));
  int neg = 0;
  for (int k = 0; k < n; ++k) {
    const long double d = M[k][k].real();
    if (d < 0) ++neg;
    for (int i = k + 1; i < n; ++i) {
      const LC l = M[i][k] / d;
      for (int j = k + 1; j < n; ++j) M[i][j] -= l * M[k][j];
    }
  }
  return neg;
}

// k-th smallest eigenvalue by bisection on the inertia count.
double bisect_eigenvalue(const CMat& A, int k) {
  long double lo = -100, hi = 100;
  for (int it = 0; it < 200; ++it) {
    const long double mid = (lo + hi) / 2;
    if (count_below(A, mid) > k)
      hi = mid;
    else
      lo = mid;
  }
  return static_cast<double>((lo + hi) / 2);
}

template <class Real>
Real max_abs(const CMatrix<Real>& A) {
  Real m(0);
  for (long j = 0; j < A.cols(); ++j)
    for (long i = 0; i < A.rows(); ++i) m = std::max(m, Real(std::abs(A(i, j))));
  return m;
}

template <class Real>
void check_invariants(const CMatrix<Real>& G, const SpectralFactorization<Real>& f) {
  const int bits = f.precision_bits;
  const long n = f.cols;
  CMatrix<Real> I = CMatrix<Real>::Identity(n, n);
  const CMatrix<Real> VtV = f.V.adjoint() * f.V;
  CHECK(to_double(max_abs<Real>(CMatrix<Real>(VtV - I))) <= std::ldexp(1.0, -bits / 2));
  CMatrix<Real> S = CMatrix<Real>::Zero(n, n);
  for (long i = 0; i < n; ++i) S(i, i) = Complex<Real>(f.values(i), Real(0));
  const CMatrix<Real> L = f.rectangular ? f.U : f.V;
  const CMatrix<Real> R = L * S * f.V.adjoint();
  CHECK(to_double(max_abs<Real>(CMatrix<Real>(G - R))) <=
        std::ldexp(1.0, -bits / 2) * to_double(f.sigma_max()));
  for (long i = 1; i < n; ++i) CHECK(f.values(i) <= f.values(i - 1));
}

}  // namespace

TEST_CASE("hermitian_eig identity and arrow matrix") {
  auto id = hermitian_eig<double>(CMat::Identity(5, 5));
  for (int i = 0; i < 5; ++i) CHECK(id.values(i) == 1.0);
  CHECK(id.sweeps == 0);

  WorkingPrecision wp(256);
  const auto spec = FrameSpec::augmented_orthonormal();
  const auto sys = assemble_square<mpreal>(spec, 8);
  const auto f = hermitian_eig<mpreal>(sys.matrix);
  mpreal r2(0);
  for (int n = 1; n < 8; ++n) r2 += pow(spec.law().coefficient<mpreal>(n), 2);
  const mpreal r = sqrt(r2);
  CHECK(abs(f.values(0) - (1 + r)) < pow2<mpreal>(-240));
  CHECK(abs(f.values(7) - (1 - r)) < pow2<mpreal>(-240));
  for (int i = 1; i < 7; ++i) CHECK(abs(f.values(i) - 1) < pow2<mpreal>(-240));
  check_invariants<mpreal>(sys.matrix, f);
}

TEST_CASE("hermitian_eig matches the bisection oracle") {
  std::mt19937_64 rng(0x5EED);
  for (int trial = 0; trial < 5; ++trial) {
    const CMat A = random_hermitian(6, rng);
    const auto f = hermitian_eig<double>(A);
    check_invariants<double>(A, f);
    for (int k = 0; k < 6; ++k) CHECK(std::abs(f.values(5 - k) - bisect_eigenvalue(A, k)) <= 1e-12);
  }
  CMat bad = CMat::Identity(3, 3);
  bad(0, 1) = 1.0;
  CHECK_THROWS_AS(hermitian_eig<double>(bad), InvalidArgument);
}

TEST_CASE("tridiagonal preconditioning agrees with plain Jacobi") {
  std::mt19937_64 rng(0xAB);
  std::normal_distribution<double> g;
  CMat A(9, 9);
  for (int j = 0; j < 9; ++j)
    for (int i = 0; i <= j; ++i) A(i, j) = A(j, i) = Complex<double>(g(rng), 0.0);
  JacobiOptions pre;
  pre.precondition = Precondition::always;
  const auto f = hermitian_eig<double>(A, pre);
  check_invariants<double>(A, f);
  for (int k = 0; k < 9; ++k) CHECK(std::abs(f.values(8 - k) - bisect_eigenvalue(A, k)) <= 1e-12);

  WorkingPrecision wp(256);
  const auto sys = assemble_square<mpreal>(FrameSpec::fourier_extension(2.0), 24);
  JacobiOptions plain;
  plain.precondition = Precondition::never;
  const auto a = hermitian_eig<mpreal>(sys.matrix, plain);
  const auto b = hermitian_eig<mpreal>(sys.matrix, pre);
  pre.vectors = false;
  const auto c = hermitian_eig<mpreal>(sys.matrix, pre);
  check_invariants<mpreal>(sys.matrix, b);
  CHECK(b.sweeps <= 2);
  for (int i = 0; i < 24; ++i) {
    CHECK(abs(a.values(i) - b.values(i)) < pow2<mpreal>(-240));
    CHECK(abs(a.values(i) - c.values(i)) < pow2<mpreal>(-240));
  }
}

TEST_CASE("hermitian_eig reports non-convergence") {
  std::mt19937_64 rng(7);
  const CMat A = random_hermitian(12, rng);
  JacobiOptions opts;
  opts.max_sweeps = 1;
  CHECK_THROWS_AS(hermitian_eig<double>(A, opts), ConvergenceError);
}

TEST_CASE("complex Hermitian Gram matrices at multiprecision") {
  WorkingPrecision wp(160);
  const auto sys = assemble_square<mpreal>(FrameSpec::augmented_fourier(3), 11);
  const auto f = hermitian_eig<mpreal>(sys.matrix);
  check_invariants<mpreal>(sys.matrix, f);
  JacobiOptions values_only;
  values_only.vectors = false;
  const auto g = hermitian_eig<mpreal>(sys.matrix, values_only);
  CHECK_FALSE(g.has_vectors());
  for (int i = 0; i < 11; ++i) CHECK(abs(f.values(i) - g.values(i)) < pow2<mpreal>(-140));
}

TEST_CASE("rect_svd") {
  // square SPD: coincides with the eigenvalues
  const auto sq = assemble_square<double>(FrameSpec::weighted_legendre(0.5), 8);
  const auto e = hermitian_eig<double>(sq.matrix);
  const auto s = rect_svd<double>(sq.matrix);
  check_invariants<double>(sq.matrix, s);
  for (int i = 0; i < 8; ++i) CHECK(std::abs(e.values(i) - s.values(i)) <= std::ldexp(1.0, -26));

  // stacked [I; 0]
  CMat st = CMat::Zero(7, 4);
  st.topRows(4) = CMat::Identity(4, 4);
  const auto f = rect_svd<double>(st);
  for (int i = 0; i < 4; ++i) CHECK(f.values(i) == doctest::Approx(1.0).epsilon(1e-15));

  // FE M = 2N = 16: sigma^2 equals the eigenvalues of G*G
  WorkingPrecision wp(200);
  const auto fe = assemble_rect<mpreal>(FrameSpec::fourier_extension(2.0), 16, 8);
  const auto svd = rect_svd<mpreal>(fe.matrix);
  check_invariants<mpreal>(fe.matrix, svd);
  CMatrix<mpreal> GtG = fe.matrix.adjoint() * fe.matrix;
  for (long j = 0; j < GtG.cols(); ++j)
    for (long i = 0; i < j; ++i) GtG(j, i) = std::conj(GtG(i, j));
  for (long i = 0; i < GtG.rows(); ++i) GtG(i, i) = Complex<mpreal>(GtG(i, i).real(), mpreal(0));
  const auto ev = hermitian_eig<mpreal>(GtG);
  for (int i = 0; i < 8; ++i)
    CHECK(abs(svd.values(i) * svd.values(i) - ev.values(i)) < pow2<mpreal>(-150));

  CHECK_THROWS_AS(rect_svd<double>(CMat::Zero(3, 4)), InvalidArgument);
}

TEST_CASE("truncate keeps sigma strictly above eps") {
  const auto sys = assemble_square<double>(FrameSpec::fourier_extension(2.0), 40);
  const auto f = hermitian_eig<double>(sys.matrix);
  const auto small = hermitian_eig<double>(assemble_square<double>(FrameSpec::fourier_extension(2.0), 10).matrix);
  REQUIRE(small.sigma_min() > 0.0);
  CHECK(truncate(small, 0.5 * small.sigma_min()).rank_kept == 10);
  CHECK(truncate(f, f.sigma_max()).rank_kept == 0);
  const auto t = truncate(f, 1e-8);
  CHECK(t.rank_kept > 0);
  CHECK(t.rank_kept < 40);
  long expect = 0;
  for (int i = 0; i < 40; ++i) expect += f.values(i) > 1e-8;
  CHECK(t.rank_kept == expect);
  // tie: sigma == eps is discarded
  CHECK(truncate(f, f.values(3)).rank_kept == 3);
  long prev = 41;
  for (double eps : {0.0, 1e-14, 1e-10, 1e-6, 1e-2, 0.5, 2.0}) {
    const long k = truncate(f, eps).rank_kept;
    CHECK(k <= prev);
    prev = k;
  }
  CHECK_THROWS_AS(truncate(f, -1.0), InvalidArgument);
}

TEST_CASE("solve_regularized") {
  const auto id = hermitian_eig<double>(CMat::Identity(4, 4));
  CVec y(4);
  y << Complex<double>(1, 2), 3.0, Complex<double>(0, -1), 0.5;
  CHECK((solve_regularized(id, y, 0.0).x - y).norm() <= 1e-15);

  const auto sys = assemble_square<double>(FrameSpec::fourier_extension(2.0), 20);
  const auto f = hermitian_eig<double>(sys.matrix);
  for (int k : {0, 7, 19}) {
    const CVec yk = f.values(k) * f.V.col(k);
    const double eps = 1e-9;
    const auto sol = solve_regularized(f, yk, eps);
    // rounding in <y, v_n> is amplified by 1/sigma_n for the kept n
    const double noise = 20 * 2.2e-16 * f.values(k) / sol.sigma_min_kept;
    if (f.values(k) > eps)
      CHECK((sol.x - f.V.col(k)).norm() <= noise + 1e-13);
    else
      CHECK(sol.x.norm() <= 1e-12);
  }
  // norm bound ||x|| <= ||y|| / sigma_min_kept, and orthogonality to the discarded space
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  CVec r(20);
  for (auto& v : r) v = Complex<double>(g(rng), g(rng));
  const auto sol = solve_regularized(f, r, 1e-6);
  CHECK(sol.x.norm() <= r.norm() / sol.sigma_min_kept * (1 + 1e-12));
  for (long n = sol.rank_kept; n < 20; ++n) CHECK(std::abs(f.V.col(n).dot(sol.x)) <= 1e-10);
  CHECK_THROWS_AS(solve_regularized(f, CVec(CVec::Zero(3)), 0.0), InvalidArgument);
}

TEST_CASE("tsvd_condition_bound") {
  const auto id = hermitian_eig<double>(CMat::Identity(3, 3));
  CHECK(tsvd_condition_bound(id, 0.0) == 1.0);
  CHECK(tsvd_condition_bound(id, 1.0) == 0.0);
  const auto f = hermitian_eig<double>(assemble_square<double>(FrameSpec::fourier_extension(2.0), 30).matrix);
  const auto t = truncate(f, 1e-8);
  CHECK(tsvd_condition_bound(f, 1e-8) == 1.0 / std::sqrt(f.values(t.rank_kept - 1)));
}
