#include "frameward/approx.hpp"

#include "frameward/errors.hpp"
#include "frameward/quadrature.hpp"

#include <cmath>
#include <sstream>

namespace frameward {

std::string to_string(Method m) {
  switch (m) {
    case Method::exact: return "exact";
    case Method::tsvd: return "tsvd";
    case Method::oversampled: return "oversampled";
    case Method::dual: return "dual";
    case Method::synthesis: return "synthesis";
  }
  return "?";
}

template <class Real>
Complex<Real> FrameApproximant<Real>::operator()(const Real& t) const {
  std::vector<Complex<Real>> phi(indices.size());
  evaluate_all<Real>(spec, indices, t, phi);
  Complex<Real> s(0);
  for (std::size_t n = 0; n < phi.size(); ++n) s += coefficients(n) * phi[n];
  return s;
}

template <class Real>
FrameApproximant<Real> synthesize(const FrameSpec& spec, long N, const CVector<Real>& z) {
  if (z.size() != N)
    throw InvalidArgument("synthesize: " + std::to_string(z.size()) + " coefficients for N = " +
                          std::to_string(N));
  return {spec, index_set(spec, N), z, Method::synthesis, std::nullopt, N,
          effective_bits<Real>(), std::nullopt};
}

double exact_rhs_tolerance(const FrameSpec& spec, long N) {
  const double l = std::ceil(std::max(0.0, forecast_log2_kappa(spec, N)));
  return std::max(std::ldexp(1.0, -static_cast<int>(l) - 32), 1e-300);
}

namespace {

template <class Real>
void require_precision(const GramSystem<Real>& sys) {
  const int need = required_bits(sys.spec, sys.N());
  if (sys.precision_bits < need) {
    std::ostringstream os;
    os << "exact projection for " << sys.spec.token() << " N=" << sys.N() << " needs " << need
       << " bits, have " << sys.precision_bits;
    throw PrecisionRefusal(os.str(), need);
  }
}

template <class Real>
const CVector<Real>& require_rhs(const GramSystem<Real>& sys) {
  if (!sys.rhs) throw InvalidArgument("Gram system has no right-hand side bound");
  return *sys.rhs;
}

template <class Real>
FrameApproximant<Real> from_solution(const GramSystem<Real>& sys, RegularizedSolution<Real> sol,
                                     Method method) {
  return {sys.spec, sys.cols, std::move(sol.x), method, std::nullopt, sys.M(),
          sys.precision_bits, sol.rank_kept};
}

}  // namespace

template <class Real>
CVector<Real> solve_exact(const GramSystem<Real>& sys, const SpectralFactorization<Real>& fact) {
  if (!sys.square()) throw InvalidArgument("solve_exact: needs a square system");
  require_precision(sys);
  return solve_regularized(fact, require_rhs(sys), Real(0)).x;
}

template <class Real>
CVector<Real> solve_exact(const GramSystem<Real>& sys) {
  if (!sys.square()) throw InvalidArgument("solve_exact: needs a square system");
  require_precision(sys);
  return solve_exact(sys, hermitian_eig<Real>(sys.matrix));
}

template <class Real>
FrameApproximant<Real> project_exact(const GramSystem<Real>& sys,
                                     const SpectralFactorization<Real>& fact) {
  if (!sys.square()) throw InvalidArgument("project_exact: needs a square system");
  require_precision(sys);
  auto a = from_solution(sys, solve_regularized(fact, require_rhs(sys), Real(0)), Method::exact);
  a.eps = 0.0;
  return a;
}

template <class Real>
FrameApproximant<Real> project_exact(const FrameSpec& spec, long N, const TargetFunction& f,
                                     double rhs_tol) {
  auto sys = assemble_square<Real>(spec, N);
  require_precision(sys);
  if (!(rhs_tol > 0.0)) rhs_tol = exact_rhs_tolerance(spec, N);
  sys = bind_target(std::move(sys), f, rhs_tol);
  return project_exact(sys, hermitian_eig<Real>(sys.matrix));
}

template <class Real>
FrameApproximant<Real> project_tsvd(const GramSystem<Real>& sys,
                                    const SpectralFactorization<Real>& fact, double eps) {
  if (!sys.square()) throw InvalidArgument("project_tsvd: needs a square system");
  if (!(eps > 0.0)) throw InvalidArgument("project_tsvd: eps must be positive");
  auto a = from_solution(sys, solve_regularized(fact, require_rhs(sys), Real(eps)), Method::tsvd);
  a.eps = eps;
  return a;
}

template <class Real>
FrameApproximant<Real> project_tsvd(const FrameSpec& spec, long N, const TargetFunction& f,
                                    double eps, double rhs_tol) {
  auto sys = bind_target(assemble_square<Real>(spec, N), f, rhs_tol);
  return project_tsvd(sys, hermitian_eig<Real>(sys.matrix), eps);
}

template <class Real>
FrameApproximant<Real> project_oversampled(const GramSystem<Real>& sys,
                                           const SpectralFactorization<Real>& fact, double eps) {
  if (!(eps >= 0.0)) throw InvalidArgument("project_oversampled: eps must be nonnegative");
  auto a = from_solution(sys, solve_regularized(fact, require_rhs(sys), Real(eps)),
                         Method::oversampled);
  a.eps = eps;
  return a;
}

template <class Real>
FrameApproximant<Real> project_oversampled(const FrameSpec& spec, long M, long N,
                                           const TargetFunction& f, double eps, double rhs_tol) {
  auto sys = bind_target(assemble_rect<Real>(spec, M, N), f, rhs_tol);
  return project_oversampled(sys, rect_svd<Real>(sys.matrix), eps);
}

// ---------------------------------------------------------------------------
// Frame algorithm

namespace {

std::vector<FrameIndex> frame_extras(const FrameSpec& spec, long reference_size) {
  std::vector<FrameIndex> e;
  switch (spec.family()) {
    case Family::FourierExtension: break;
    case Family::AugmentedFourier:
      for (long k = 1; k <= spec.K(); ++k) e.push_back(FrameIndex::legendre(k));
      break;
    case Family::WeightedLegendre:
      if (reference_size < 2)
        throw InvalidArgument("frame algorithm: weighted Legendre needs a reference size");
      for (long n = 1; n <= reference_size / 2; ++n) e.push_back(FrameIndex::weighted(n));
      break;
    case Family::AugmentedOrthonormal: e.push_back(FrameIndex::extra()); break;
  }
  return e;
}

}  // namespace

Complex<double> FrameAlgorithmResult::operator()(const double& t) const {
  Complex<double> s = alpha * f(t);
  for (std::size_t j = 0; j < extras.size(); ++j) s += c(j) * evaluate<double>(spec, extras[j], t);
  return s;
}

std::vector<double> FrameAlgorithmResult::contraction() const {
  std::vector<double> r;
  for (std::size_t k = 1; k < update_norms.size(); ++k)
    if (update_norms[k - 1] > 0) r.push_back(update_norms[k] / update_norms[k - 1]);
  return r;
}

FrameAlgorithmResult frame_algorithm_inverse(const FrameSpec& spec, const TargetFunction& f,
                                             const FrameAlgorithmOptions& opts) {
  require_compatible(spec, f);
  const double A = spec.lower_frame_bound(), B = spec.upper_frame_bound();
  const double lambda = opts.relax > 0.0 ? opts.relax : 2.0 / (A + B);

  FrameAlgorithmResult res{spec, f, Complex<double>(0), frame_extras(spec, opts.reference_size),
                           {}, {}, 0};
  const long E = static_cast<long>(res.extras.size());
  CMatrix<double> G(E, E);
  for (long j = 0; j < E; ++j)
    for (long i = 0; i <= j; ++i) {
      G(i, j) = pair_inner_product<double>(spec, res.extras[i], res.extras[j]);
      G(j, i) = std::conj(G(i, j));
    }
  const CVector<double> q =
      E > 0 ? analysis<double>(spec, res.extras, f, opts.quad_tol) : CVector<double>(0);
  const double fnorm = target_norm<double>(spec, f, opts.quad_tol);
  res.c = CVector<double>::Zero(E);

  // r = f - S h = beta f + sum_j d_j psi_j for h = alpha f + sum_j c_j psi_j.
  for (int it = 1; it <= opts.max_iterations; ++it) {
    const Complex<double> beta = 1.0 - res.alpha;
    const CVector<double> d = -(res.c + res.alpha * q + G * res.c);
    double r2 = std::norm(beta) * fnorm * fnorm;
    if (E > 0) r2 += 2.0 * (beta * d.dot(q)).real() + d.dot(G * d).real();
    const double update = lambda * std::sqrt(std::max(r2, 0.0));
    res.alpha += lambda * beta;
    res.c += lambda * d;
    res.update_norms.push_back(update);
    res.iterations = it;
    if (update <= opts.tol) return res;
  }
  std::ostringstream os;
  os << "frame algorithm did not converge in " << opts.max_iterations << " iterations";
  throw ConvergenceError(os.str(), opts.max_iterations, res.update_norms.back());
}

CVector<double> dual_coefficients(const FrameSpec& spec, long N, const TargetFunction& f,
                                  FrameAlgorithmOptions opts) {
  const auto idx = index_set(spec, N);
  const CVector<double> y = analysis<double>(spec, idx, f, opts.quad_tol);
  if (spec.family() == Family::FourierExtension) return y;
  if (opts.reference_size <= 0) opts.reference_size = 8 * N;
  const auto S = frame_algorithm_inverse(spec, f, opts);
  CVector<double> a = S.alpha * y;
  for (long n = 0; n < N; ++n)
    for (std::size_t j = 0; j < S.extras.size(); ++j)
      a(n) += S.c(j) * pair_inner_product<double>(spec, idx[n], S.extras[j]);
  return a;
}

FrameApproximant<double> project_dual(const FrameSpec& spec, long N, const TargetFunction& f,
                                      FrameAlgorithmOptions opts) {
  auto a = synthesize<double>(spec, N, dual_coefficients(spec, N, f, opts));
  a.method = Method::dual;
  return a;
}

// ---------------------------------------------------------------------------

template <class Real>
void XiBasis<Real>::evaluate_all(const Real& t, std::span<Complex<Real>> out) const {
  std::vector<Complex<Real>> phi(indices.size());
  frameward::evaluate_all<Real>(spec, indices, t, phi);
  for (long n = 0; n < size(); ++n) {
    Complex<Real> s(0);
    for (long m = 0; m < V.rows(); ++m) s += V(m, n) * phi[m];
    out[n] = s;
  }
}

template <class Real>
Complex<Real> XiBasis<Real>::operator()(long n, const Real& t) const {
  std::vector<Complex<Real>> phi(indices.size());
  frameward::evaluate_all<Real>(spec, indices, t, phi);
  Complex<Real> s(0);
  for (long m = 0; m < V.rows(); ++m) s += V(m, n) * phi[m];
  return s;
}

template <class Real>
XiBasis<Real> xi_basis(const FrameSpec& spec, const SpectralFactorization<Real>& fact) {
  if (fact.rectangular) throw InvalidArgument("xi_basis: needs a square factorization");
  if (!fact.has_vectors()) throw InvalidArgument("xi_basis: factorization has no vectors");
  return {spec, index_set(spec, fact.cols), fact.V, fact.values};
}

// ---------------------------------------------------------------------------

namespace {

// ||sum b_n e_n - (x_0 g + sum_{n<N} x_n e_n)|| with b, c power laws.
template <class Real>
double coefficient_space_error(const TargetFunction& f, const FrameApproximant<Real>& a) {
  const PowerLaw b = *f.law;
  const PowerLaw c = a.spec.law();
  Complex<Real> x0(0);
  std::vector<Complex<Real>> xo(a.N() + 1, Complex<Real>(0));
  long last = 0;
  for (long k = 0; k < a.N(); ++k) {
    const auto& idx = a.indices[k];
    if (idx.tag == FrameIndex::Tag::extra) {
      x0 += a.coefficients(k);
    } else {
      xo[idx.n] += a.coefficients(k);
      last = std::max(last, idx.n);
    }
  }
  Real e2(0);
  for (long n = 1; n <= last; ++n)
    e2 += std::norm(Complex<Real>(b.coefficient<Real>(n)) - x0 * c.coefficient<Real>(n) - xo[n]);
  const long first = last + 1;
  const Real Ab = b.amplitude<Real>(), Ac = c.amplitude<Real>();
  e2 += Ab * Ab * zeta_tail<Real>(2 * b.power, first) -
        2 * x0.real() * Ab * Ac * zeta_tail<Real>(b.power + c.power, first) +
        std::norm(x0) * Ac * Ac * zeta_tail<Real>(2 * c.power, first);
  using std::sqrt;
  return to_double(sqrt(e2 > 0 ? e2 : Real(0)));
}

}  // namespace

template <class Real>
double error_l2(const TargetFunction& f, const FrameApproximant<Real>& a, double tol) {
  require_compatible(a.spec, f);
  if (f.law) return coefficient_space_error(f, a);
  std::vector<Complex<Real>> phi(a.indices.size());
  // The synthesis sum cancels: its rounding error is about
  // u * max_t (|f| + sum |x_n phi_n|), sampled here on a uniform grid.
  const Interval d = a.spec.domain();
  double scale = 0.0;
  constexpr int kSamples = 257;
  for (int i = 0; i < kSamples; ++i) {
    const Real t = Real(d.lo) + Real(d.length()) * Real(i) / Real(kSamples - 1);
    evaluate_all<Real>(a.spec, a.indices, t, phi);
    double m = to_double(std::abs(f(t)));
    if (std::isfinite(m) == false) m = 0.0;
    for (std::size_t n = 0; n < phi.size(); ++n) m += to_double(std::abs(a.coefficients(n) * phi[n]));
    scale = std::max(scale, m);
  }
  const double floor =
      64.0 * std::ldexp(1.0, -effective_bits<Real>()) * scale * std::sqrt(d.length());
  tol = std::max(tol, floor);
  Evaluator<Real> g = [&](const Real& t) {
    evaluate_all<Real>(a.spec, a.indices, t, phi);
    Complex<Real> s = f(t);
    for (std::size_t n = 0; n < phi.size(); ++n) s -= a.coefficients(n) * phi[n];
    return s;
  };
  return to_double(l2_norm<Real>(g, a.spec.domain(), tol, quadrature_options(a.spec, f)));
}

#define FRAMEWARD_INSTANTIATE(Real)                                                              \
  template struct FrameApproximant<Real>;                                                        \
  template struct XiBasis<Real>;                                                                 \
  template FrameApproximant<Real> synthesize<Real>(const FrameSpec&, long, const CVector<Real>&); \
  template CVector<Real> solve_exact<Real>(const GramSystem<Real>&);                            \
  template CVector<Real> solve_exact<Real>(const GramSystem<Real>&,                             \
                                           const SpectralFactorization<Real>&);                  \
  template FrameApproximant<Real> project_exact<Real>(const FrameSpec&, long,                   \
                                                      const TargetFunction&, double);            \
  template FrameApproximant<Real> project_exact<Real>(const GramSystem<Real>&,                  \
                                                      const SpectralFactorization<Real>&);       \
  template FrameApproximant<Real> project_tsvd<Real>(const FrameSpec&, long,                    \
                                                     const TargetFunction&, double, double);     \
  template FrameApproximant<Real> project_tsvd<Real>(const GramSystem<Real>&,                   \
                                                     const SpectralFactorization<Real>&, double); \
  template FrameApproximant<Real> project_oversampled<Real>(                                    \
      const FrameSpec&, long, long, const TargetFunction&, double, double);                      \
  template FrameApproximant<Real> project_oversampled<Real>(                                    \
      const GramSystem<Real>&, const SpectralFactorization<Real>&, double);                      \
  template XiBasis<Real> xi_basis<Real>(const FrameSpec&, const SpectralFactorization<Real>&);  \
  template double error_l2<Real>(const TargetFunction&, const FrameApproximant<Real>&, double);

FRAMEWARD_INSTANTIATE(double)
FRAMEWARD_INSTANTIATE(mpreal)

#undef FRAMEWARD_INSTANTIATE

}  // namespace frameward
