#include <doctest.h>

#include "frameward/errors.hpp"
#include "frameward/gram.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

using namespace frameward;

namespace {

std::vector<FrameSpec> all_families() {
  return {FrameSpec::fourier_extension(2.0), FrameSpec::augmented_fourier(4),
          FrameSpec::weighted_legendre(0.5), FrameSpec::augmented_orthonormal()};
}

long position(const std::vector<FrameIndex>& idx, const FrameIndex& x) {
  return std::find(idx.begin(), idx.end(), x) - idx.begin();
}

}  // namespace

TEST_CASE("augmented orthonormal Gram is an arrow matrix") {
  const auto spec = FrameSpec::augmented_orthonormal();
  const auto sys = assemble_square<double>(spec, 4);
  const double c1 = std::sqrt(90.0) / (M_PI * M_PI);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double want = i == j ? 1.0 : 0.0;
      if (i == 0 && j > 0) want = c1 / (j * j);
      if (j == 0 && i > 0) want = c1 / (i * i);
      CHECK(std::abs(sys.matrix(i, j) - Complex<double>(want)) <= 1e-15);
    }
}

TEST_CASE("Fourier blocks are identity and FE is Toeplitz") {
  const auto af = FrameSpec::augmented_fourier(2);
  const auto sys = assemble_square<double>(af, 10);
  for (int i = 2; i < 10; ++i)
    for (int j = 2; j < 10; ++j)
      CHECK(std::abs(sys.matrix(i, j) - Complex<double>(i == j ? 1.0 : 0.0)) <= 1e-15);

  const auto fe = FrameSpec::fourier_extension(2.0);
  const auto g = assemble_square<double>(fe, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const long d = g.cols[j].n - g.rows[i].n;
      const double want = d == 0 ? 0.5 : std::sin(M_PI * d / 2.0) / (M_PI * d);
      CHECK(std::abs(g.matrix(i, j) - Complex<double>(want)) <= 1e-16);
      if (std::abs(d) == 1) CHECK(g.matrix(i, j).real() == doctest::Approx(1 / M_PI).epsilon(1e-15));
    }
  // Hermitian to the last bit.
  for (const auto& spec : all_families()) {
    const auto s = assemble_square<double>(spec, 12);
    CHECK(s.matrix == s.matrix.adjoint());
  }
}

TEST_CASE("assemble_rect") {
  for (const auto& spec : all_families()) {
    const long N = spec.family() == Family::AugmentedFourier ? 8 : 6;
    const auto sq = assemble_square<double>(spec, N);
    const auto r = assemble_rect<double>(spec, N, N);
    CHECK(r.matrix == sq.matrix);
    const long M = spec.family() == Family::AugmentedFourier ? N + 2 : 2 * N;
    const auto rect = assemble_rect<double>(spec, M, N);
    CHECK(rect.M() == M);
    CHECK(rect.rows == index_set(spec, M));
    CHECK(rect.matrix.topRows(N) == sq.matrix);
    for (long m = 0; m < M; ++m)
      for (long n = 0; n < N; ++n)
        CHECK(rect.matrix(m, n) == pair_inner_product<double>(spec, rect.rows[m], rect.cols[n]));
  }
  const auto af = assemble_rect<double>(FrameSpec::augmented_fourier(2), 8, 6);
  CHECK(af.rows[6].tag == FrameIndex::Tag::fourier);
  CHECK(af.rows[7].tag == FrameIndex::Tag::fourier);
  CHECK_THROWS_AS(assemble_rect<double>(FrameSpec::fourier_extension(2.0), 4, 6), InvalidArgument);
  CHECK_THROWS_AS(assemble_square<double>(FrameSpec::fourier_extension(2.0), 5), InvalidArgument);
}

TEST_CASE("bind_target") {
  const auto fe = FrameSpec::fourier_extension(2.0);
  const auto zero = TargetFunction::from("zero", [](const auto&) { return 0.0; });
  auto s0 = bind_target(assemble_square<double>(fe, 6), zero, 1e-14);
  REQUIRE(s0.rhs);
  CHECK(s0.rhs->norm() == 0.0);

  // f = phi_1 reproduces the matching Gram column.
  TargetFunction phi1;
  phi1.id = "phi1";
  phi1.eval_double = [&](const double& t) { return evaluate<double>(fe, FrameIndex::fourier(1), t); };
  phi1.eval_mp = [&](const mpreal& t) { return evaluate<mpreal>(fe, FrameIndex::fourier(1), t); };
  auto s1 = bind_target(assemble_square<double>(fe, 8), phi1, 1e-14);
  const long k = position(s1.cols, FrameIndex::fourier(1));
  REQUIRE(k < 8);
  CHECK((*s1.rhs - s1.matrix.col(k)).cwiseAbs().maxCoeff() <= 1e-13);

  // Coefficient-space target b_n = (sqrt 6/pi) / n against c_n = (sqrt 90/pi^2) / n^2.
  const auto ao = FrameSpec::augmented_orthonormal();
  const auto f = make_target("synthetic-p51");
  auto s2 = bind_target(assemble_square<double>(ao, 5), f, 1e-14);
  const double b = std::sqrt(6.0) / M_PI, c = std::sqrt(90.0) / (M_PI * M_PI);
  double series = 0.0;
  for (long n = 200000; n >= 1; --n) series += 1.0 / (double(n) * n * n);
  series += 1.0 / (2.0 * 200000.5 * 200000.5);  // Euler-Maclaurin tail
  CHECK(std::abs((*s2.rhs)(0).real() - b * c * series) <= 1e-12);
  for (int n = 1; n < 5; ++n) CHECK(std::abs((*s2.rhs)(n).real() - b / n) <= 1e-15);
  CHECK_THROWS_AS(bind_target(assemble_square<double>(fe, 4), f, 1e-14), InvalidArgument);
}

TEST_CASE("frame bounds") {
  const auto idb = frame_bounds(hermitian_eig<double>(CMatrix<double>::Identity(6, 6)));
  CHECK(idb.A == 1.0);
  CHECK(idb.B == 1.0);

  WorkingPrecision wp(256);
  const auto ao = FrameSpec::augmented_orthonormal();
  for (long N : {4L, 16L, 64L}) {
    const auto fb = frame_bounds(assemble_square<mpreal>(ao, N));
    mpreal r2(0);
    for (long n = 1; n < N; ++n) r2 += pow(ao.law().coefficient<mpreal>(n), 2);
    CHECK(std::abs(fb.A - to_double(1 - sqrt(r2))) <= 1e-15);
    CHECK(std::abs(fb.B - to_double(1 + sqrt(r2))) <= 1e-15);
  }
  const auto fe = FrameSpec::fourier_extension(2.0);
  const auto b20 = frame_bounds(assemble_square<mpreal>(fe, 20));
  CHECK(b20.kappa() > 5.64e13 / 10);
  CHECK(b20.kappa() < 5.64e13 * 10);
}

TEST_CASE("Rayleigh quotients lie between the truncated frame bounds") {
  std::mt19937_64 rng(0x5EED);
  std::normal_distribution<double> g;
  for (const auto& spec : all_families()) {
    const long N = 12;
    const auto sys = assemble_square<double>(spec, N);
    const auto fb = frame_bounds(sys);
    for (int trial = 0; trial < 100; ++trial) {
      CVector<double> x(N);
      for (long i = 0; i < N; ++i) x(i) = Complex<double>(g(rng), g(rng));
      x /= x.norm();
      const double q = x.dot(sys.matrix * x).real();
      CHECK(q >= fb.A - 1e-14);
      CHECK(q <= fb.B + 1e-14);
    }
  }
}

TEST_CASE("spectral pollution below A for FE at N=50") {
  WorkingPrecision wp(256);
  JacobiOptions opts;
  opts.vectors = false;
  const auto f = hermitian_eig<mpreal>(assemble_square<mpreal>(FrameSpec::fourier_extension(2.0), 50).matrix, opts);
  CHECK(f.values(49) < mpreal(0.1));
}

TEST_CASE("truncated frame bounds are monotone in N") {
  WorkingPrecision wp(256);
  for (const auto& spec : all_families()) {
    double prevA = 2.0, prevB = 0.0;
    for (long N = 2; N <= 20; ++N) {
      if (!is_admissible(spec, N)) continue;
      const auto fb = frame_bounds(assemble_square<mpreal>(spec, N));
      CHECK(fb.A <= prevA * (1 + 1e-12));
      CHECK(fb.B >= prevB * (1 - 1e-12));
      CHECK(fb.B <= spec.upper_frame_bound() + 1e-12);
      prevA = fb.A;
      prevB = fb.B;
    }
  }
}

TEST_CASE("precision rule and matrix dump") {
  const auto fe = FrameSpec::fourier_extension(2.0);
  CHECK(required_bits(fe, 160) >= 768);
  CHECK(forecast_log2_kappa(fe, 2) == doctest::Approx(4 * std::log2(1 / std::tan(M_PI / 8))));
  CHECK(forecast_log2_kappa(FrameSpec::augmented_fourier(4), 16) == doctest::Approx(28.0));
  CHECK(forecast_log2_kappa(FrameSpec::weighted_legendre(0.5), 10) == 20.0);
  CHECK(required_bits(fe, 2) == 64 + 2 * static_cast<int>(std::ceil(forecast_log2_kappa(fe, 2))));

  std::ostringstream os;
  dump_matrix(assemble_square<double>(fe, 2), os);
  CHECK(os.str() == "0 0 0.5 0\n0 1 0.31830988618379069 0\n1 0 0.31830988618379069 0\n1 1 0.5 0\n");
}
