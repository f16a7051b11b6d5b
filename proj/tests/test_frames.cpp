#include <doctest.h>

#include "frameward/errors.hpp"
#include "frameward/frames.hpp"
#include "frameward/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace frameward;

namespace {

std::vector<long> fourier_numbers(const std::vector<FrameIndex>& idx) {
  std::vector<long> out;
  for (const auto& i : idx)
    if (i.tag == FrameIndex::Tag::fourier) out.push_back(i.n);
  return out;
}

// Independent Legendre recurrence in long double, unnormalized.
long double legendre_p(int k, long double t) {
  long double p0 = 1.0L, p1 = t;
  if (k == 0) return p0;
  for (int j = 1; j < k; ++j) {
    long double p2 = ((2 * j + 1) * t * p1 - j * p0) / (j + 1);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

std::vector<FrameSpec> all_families() {
  return {FrameSpec::fourier_extension(2.0), FrameSpec::augmented_fourier(4),
          FrameSpec::weighted_legendre(0.5), FrameSpec::augmented_orthonormal()};
}

}  // namespace

TEST_CASE("index_set examples") {
  auto fe = index_set(FrameSpec::fourier_extension(2.0), 4);
  auto n = fourier_numbers(fe);
  std::sort(n.begin(), n.end());
  CHECK(n == std::vector<long>{-2, -1, 0, 1});

  auto af = index_set(FrameSpec::augmented_fourier(2), 6);
  REQUIRE(af.size() == 6);
  CHECK(af[0] == FrameIndex::legendre(1));
  CHECK(af[1] == FrameIndex::legendre(2));
  auto afn = fourier_numbers(af);
  std::sort(afn.begin(), afn.end());
  CHECK(afn == std::vector<long>{-2, -1, 0, 1});

  auto wl = index_set(FrameSpec::weighted_legendre(0.5), 2);
  CHECK(wl == std::vector<FrameIndex>{FrameIndex::legendre(1), FrameIndex::weighted(1)});

  auto ao = index_set(FrameSpec::augmented_orthonormal(), 3);
  CHECK(ao == std::vector<FrameIndex>{FrameIndex::extra(), FrameIndex::ortho(1), FrameIndex::ortho(2)});
}

TEST_CASE("index sets are nested and sized") {
  for (const auto& spec : all_families()) {
    std::vector<long> adm;
    for (long N = 1; N <= 60; ++N)
      if (is_admissible(spec, N)) adm.push_back(N);
    REQUIRE(adm.size() >= 2);
    const auto big = index_set(spec, adm.back());
    for (long N : adm) {
      const auto s = index_set(spec, N);
      REQUIRE(static_cast<long>(s.size()) == N);
      CHECK(std::equal(s.begin(), s.end(), big.begin()));
      for (const auto& i : s) CHECK(is_legal(spec, i));
    }
    // FE and augmented Fourier: the Fourier part is a symmetric-minus-one window.
    if (spec.family() == Family::FourierExtension) {
      auto f = fourier_numbers(index_set(spec, 10));
      CHECK(*std::min_element(f.begin(), f.end()) == -5);
      CHECK(*std::max_element(f.begin(), f.end()) == 4);
    }
  }
}

TEST_CASE("inadmissible truncations name the rule") {
  CHECK_THROWS_WITH_AS(index_set(FrameSpec::fourier_extension(2.0), 5),
                       doctest::Contains("FourierExtension"), InvalidArgument);
  CHECK_THROWS_AS(index_set(FrameSpec::augmented_fourier(3), 4), InvalidArgument);
  CHECK_THROWS_AS(index_set(FrameSpec::augmented_fourier(3), 1), InvalidArgument);
  CHECK_THROWS_AS(index_set(FrameSpec::weighted_legendre(0.5), 3), InvalidArgument);
  CHECK_THROWS_AS(index_set(FrameSpec::augmented_orthonormal(), 0), InvalidArgument);
  CHECK_THROWS_AS(FrameSpec::fourier_extension(1.0), InvalidArgument);
  CHECK_THROWS_AS(FrameSpec::augmented_fourier(0), InvalidArgument);
  CHECK_THROWS_AS(FrameSpec::weighted_legendre(1.0), InvalidArgument);
}

TEST_CASE("evaluate examples") {
  const auto fe = FrameSpec::fourier_extension(2.0);
  auto v = evaluate(fe, FrameIndex::fourier(0), 0.3);
  CHECK(v.real() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(v.imag() == 0.0);
  auto e = evaluate(fe, FrameIndex::fourier(3), 0.2);
  CHECK(std::abs(e - std::polar(1.0 / std::sqrt(2.0), 3 * M_PI * 0.2)) <= 1e-15);

  const auto af = FrameSpec::augmented_fourier(2);
  CHECK(evaluate(af, FrameIndex::legendre(1), 1.0).real() ==
        doctest::Approx(std::sqrt(1.5)).epsilon(1e-15));

  const auto wl = FrameSpec::weighted_legendre(0.5);
  for (double t : {-1.0, -0.9, 0.0, 0.5, 1.0}) {
    for (int n = 1; n <= 6; ++n) {
      const long double leg = std::sqrt((n - 1) + 0.5L) * legendre_p(n - 1, t);
      const long double want = std::sqrt(1.0L + t) * leg;
      CHECK(evaluate(wl, FrameIndex::legendre(n), t).real() ==
            doctest::Approx(static_cast<double>(leg)).epsilon(1e-14));
      CHECK(std::abs(evaluate(wl, FrameIndex::weighted(n), t).real() - static_cast<double>(want)) <=
            1e-14);
    }
  }
  CHECK_THROWS_AS(evaluate(fe, FrameIndex::fourier(0), 0.6), InvalidArgument);
  CHECK_THROWS_AS(evaluate(af, FrameIndex::legendre(3), 0.0), InvalidArgument);
  CHECK_THROWS_AS(evaluate(FrameSpec::augmented_orthonormal(), FrameIndex::extra(), 0.0),
                  InvalidArgument);

  const auto idx = index_set(wl, 12);
  std::vector<Complex<double>> all(idx.size());
  evaluate_all<double>(wl, idx, 0.37, all);
  for (std::size_t i = 0; i < idx.size(); ++i)
    CHECK(std::abs(all[i] - evaluate(wl, idx[i], 0.37)) <= 1e-15);
}

TEST_CASE("pair inner product examples") {
  const auto fe = FrameSpec::fourier_extension(2.0);
  CHECK(pair_inner_product<double>(fe, FrameIndex::fourier(3), FrameIndex::fourier(3)).real() == 0.5);
  CHECK(pair_inner_product<double>(fe, FrameIndex::fourier(0), FrameIndex::fourier(1)).real() ==
        doctest::Approx(1.0 / M_PI).epsilon(1e-15));

  const auto af = FrameSpec::augmented_fourier(3);
  CHECK(std::abs(pair_inner_product<double>(af, FrameIndex::fourier(2), FrameIndex::fourier(-1))) == 0.0);
  for (int k = 1; k <= 3; ++k)
    CHECK(std::abs(pair_inner_product<double>(af, FrameIndex::legendre(k), FrameIndex::fourier(0))) <=
          1e-15);

  const auto ao = FrameSpec::augmented_orthonormal();
  const double c1 = std::sqrt(90.0) / (M_PI * M_PI);
  CHECK(pair_inner_product<double>(ao, FrameIndex::extra(), FrameIndex::ortho(1)).real() ==
        doctest::Approx(c1).epsilon(1e-15));
  CHECK(pair_inner_product<double>(ao, FrameIndex::ortho(3), FrameIndex::extra()).real() ==
        doctest::Approx(c1 / 9.0).epsilon(1e-15));
}

TEST_CASE("Hermitian symmetry and quadrature oracle agreement") {
  std::mt19937_64 rng(0x5EED);
  for (const auto& spec : all_families()) {
    if (!spec.has_pointwise_values()) continue;
    long N = spec.family() == Family::AugmentedFourier ? 40 : 30;
    const auto idx = index_set(spec, N);
    std::uniform_int_distribution<std::size_t> pick(0, idx.size() - 1);
    const Interval omega = spec.domain();
    for (int trial = 0; trial < 20; ++trial) {
      const auto& a = idx[pick(rng)];
      const auto& b = idx[pick(rng)];
      const auto ab = pair_inner_product<double>(spec, a, b);
      const auto ba = pair_inner_product<double>(spec, b, a);
      CHECK(ab == std::conj(ba));
      AdaptiveOptions opts;
      opts.graded_left = spec.family() == Family::WeightedLegendre;
      Evaluator<double> fa = [&](const double& t) { return evaluate(spec, a, t); };
      Evaluator<double> fb = [&](const double& t) { return evaluate(spec, b, t); };
      const auto q = integrate_against(fb, fa, omega, 1e-15, opts);
      const double scale =
          std::max(std::abs(ab), element_norm<double>(spec, a) * element_norm<double>(spec, b));
      CHECK(std::abs(q - ab) <= 1e-13 * scale);
    }
  }
}

TEST_CASE("multiprecision inner products agree with double") {
  WorkingPrecision wp(200);
  for (const auto& spec : all_families()) {
    const auto idx = index_set(spec, spec.family() == Family::AugmentedFourier ? 12 : 10);
    for (const auto& a : idx)
      for (const auto& b : idx) {
        const auto hi = pair_inner_product<mpreal>(spec, a, b);
        const auto lo = pair_inner_product<double>(spec, a, b);
        CHECK(std::abs(to_double(hi) - lo) <= 4e-16);
      }
  }
}

TEST_CASE("Fourier extension frame is tight") {
  // f = e^t on (-1/2, 1/2): <f, phi_n> has the closed form below.
  const double T = 2.0;
  const double norm2 = std::sinh(1.0);
  double sum = 0.0;
  for (long n = -2000; n <= 2000; ++n) {
    const std::complex<double> a(1.0, -M_PI * n);
    const auto c = (std::exp(a * 0.5) - std::exp(-a * 0.5)) / a / std::sqrt(2.0);
    sum += std::norm(c);
  }
  const double tail = 2.0 * 2.0 * std::exp(1.0) / (M_PI * M_PI * 2000.0);
  CHECK(sum <= norm2);
  CHECK(norm2 - sum <= tail);
  // spot check one coefficient against quadrature
  const auto fe = FrameSpec::fourier_extension(T);
  Evaluator<double> f = [](const double& t) { return Complex<double>(std::exp(t)); };
  Evaluator<double> p = [&](const double& t) { return evaluate(fe, FrameIndex::fourier(7), t); };
  const std::complex<double> a(1.0, -7 * M_PI);
  const auto c = (std::exp(a * 0.5) - std::exp(-a * 0.5)) / a / std::sqrt(2.0);
  CHECK(std::abs(integrate_against(f, p, fe.domain(), 1e-15) - c) <= 1e-14);
}
