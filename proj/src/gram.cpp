#include "frameward/gram.hpp"

#include "frameward/errors.hpp"
#include "frameward/quadrature.hpp"

#include <cmath>
#include <map>
#include <ostream>

namespace frameward {

namespace {

template <class Real>
Complex<Real> entry(const FrameSpec& spec, const FrameIndex& m, const FrameIndex& n,
                    std::map<long, Complex<Real>>& toeplitz) {
  // Fourier extension entries depend only on the frequency difference.
  if (spec.family() == Family::FourierExtension) {
    const long d = n.n - m.n;
    auto it = toeplitz.find(d);
    if (it != toeplitz.end()) return it->second;
    auto v = pair_inner_product<Real>(spec, m, n);
    toeplitz.emplace(d, v);
    return v;
  }
  return pair_inner_product<Real>(spec, m, n);
}

}  // namespace

template <class Real>
GramSystem<Real> assemble_rect(const FrameSpec& spec, long M, long N) {
  require_admissible(spec, N);
  require_admissible(spec, M);
  if (M < N)
    throw InvalidArgument("assemble_rect: needs M >= N, got M = " + std::to_string(M) +
                          ", N = " + std::to_string(N));
  GramSystem<Real> sys{spec, index_set(spec, M), index_set(spec, N), {}, std::nullopt,
                       effective_bits<Real>()};
  std::map<long, Complex<Real>> toeplitz;
  sys.matrix.resize(M, N);
  for (long n = 0; n < N; ++n) {
    for (long m = 0; m <= n; ++m) {
      const auto v = entry<Real>(spec, sys.rows[m], sys.cols[n], toeplitz);
      sys.matrix(m, n) = v;
      sys.matrix(n, m) = std::conj(v);
    }
    // Diagonal entries are real: drop any rounding residue.
    sys.matrix(n, n) = Complex<Real>(sys.matrix(n, n).real(), Real(0));
  }
  for (long m = N; m < M; ++m)
    for (long n = 0; n < N; ++n)
      sys.matrix(m, n) = entry<Real>(spec, sys.rows[m], sys.cols[n], toeplitz);
  return sys;
}

template <class Real>
GramSystem<Real> assemble_square(const FrameSpec& spec, long N) {
  return assemble_rect<Real>(spec, N, N);
}

template <class Real>
CVector<Real> analysis(const FrameSpec& spec, const std::vector<FrameIndex>& indices,
                       const TargetFunction& f, double tol) {
  require_compatible(spec, f);
  const long M = static_cast<long>(indices.size());
  CVector<Real> y(M);
  if (spec.family() == Family::AugmentedOrthonormal) {
    const PowerLaw b = *f.law;
    const PowerLaw c = spec.law();
    for (long m = 0; m < M; ++m) {
      const auto& idx = indices[m];
      if (idx.tag == FrameIndex::Tag::extra) {
        y(m) = Complex<Real>(b.amplitude<Real>() * c.amplitude<Real>() * zeta<Real>(b.power + c.power),
                             Real(0));
      } else {
        y(m) = Complex<Real>(b.coefficient<Real>(idx.n), Real(0));
      }
    }
    return y;
  }
  if (!(tol > 0.0)) throw InvalidArgument("analysis: tolerance must be positive");
  AdaptiveOptions opts = quadrature_options(spec, f);
  opts.abs_tol = tol;
  std::vector<Complex<Real>> phi(M);
  VectorIntegrand<Real> integrand = [&](const Real& t, std::span<Complex<Real>> out) {
    evaluate_all<Real>(spec, indices, t, phi);
    const Complex<Real> ft = f(t);
    for (long m = 0; m < M; ++m) out[m] = ft * std::conj(phi[m]);
  };
  const Interval d = spec.domain();
  auto res = integrate_adaptive<Real>(integrand, static_cast<int>(M), Real(d.lo), Real(d.hi), opts);
  for (long m = 0; m < M; ++m) y(m) = res.values[m];
  return y;
}

template <class Real>
GramSystem<Real> bind_target(GramSystem<Real> sys, const TargetFunction& f, double tol) {
  sys.rhs = analysis<Real>(sys.spec, sys.rows, f, tol);
  return sys;
}

template <class Real>
FrameBounds frame_bounds(const SpectralFactorization<Real>& fact) {
  if (fact.rectangular) throw InvalidArgument("frame_bounds: needs a square factorization");
  return {to_double(fact.sigma_min()), to_double(fact.sigma_max())};
}

template <class Real>
FrameBounds frame_bounds(const GramSystem<Real>& sys) {
  if (!sys.square()) throw InvalidArgument("frame_bounds: needs a square Gram system");
  JacobiOptions opts;
  opts.vectors = false;
  return frame_bounds(hermitian_eig<Real>(sys.matrix, opts));
}

double forecast_log2_kappa(const FrameSpec& spec, long N) {
  require_admissible(spec, N);
  switch (spec.family()) {
    case Family::FourierExtension: {
      const double c = 1.0 / std::tan(M_PI / (4.0 * spec.T()));
      return N * std::log2(c * c);
    }
    case Family::AugmentedFourier:
      return (2.0 * spec.K() - 1.0) * std::log2(static_cast<double>(std::max<long>(N, 2)));
    case Family::WeightedLegendre: return 2.0 * N;
    case Family::AugmentedOrthonormal: {
      const int p2 = 2 * spec.law().power;
      const double one_minus_r2 = zeta_tail<double>(p2, N) / zeta<double>(p2);
      const double r = std::sqrt(1.0 - one_minus_r2);
      return std::log2((1.0 + r) * (1.0 + r) / one_minus_r2);
    }
  }
  return 0.0;
}

int required_bits(const FrameSpec& spec, long N) {
  const double l = std::max(0.0, forecast_log2_kappa(spec, N));
  return 64 + 2 * static_cast<int>(std::ceil(l));
}

template <class Real>
void dump_matrix(const GramSystem<Real>& sys, std::ostream& os) {
  // Adding zero turns -0 into 0.
  for (long m = 0; m < sys.M(); ++m)
    for (long n = 0; n < sys.N(); ++n)
      os << m << ' ' << n << ' ' << to_decimal(Real(sys.matrix(m, n).real() + Real(0))) << ' '
         << to_decimal(Real(sys.matrix(m, n).imag() + Real(0))) << '\n';
}

#define FRAMEWARD_INSTANTIATE(Real)                                                            \
  template GramSystem<Real> assemble_square<Real>(const FrameSpec&, long);                    \
  template GramSystem<Real> assemble_rect<Real>(const FrameSpec&, long, long);                \
  template GramSystem<Real> bind_target<Real>(GramSystem<Real>, const TargetFunction&, double); \
  template CVector<Real> analysis<Real>(const FrameSpec&, const std::vector<FrameIndex>&,     \
                                        const TargetFunction&, double);                        \
  template FrameBounds frame_bounds<Real>(const GramSystem<Real>&);                           \
  template FrameBounds frame_bounds<Real>(const SpectralFactorization<Real>&);                \
  template void dump_matrix<Real>(const GramSystem<Real>&, std::ostream&);

FRAMEWARD_INSTANTIATE(double)
FRAMEWARD_INSTANTIATE(mpreal)

#undef FRAMEWARD_INSTANTIATE

}  // namespace frameward
