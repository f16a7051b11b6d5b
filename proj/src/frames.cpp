#include "frameward/frames.hpp"

#include "frameward/errors.hpp"
#include "frameward/quadrature.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace frameward {

namespace {

std::string shortest(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

template <class Real>
Real real_pow(const Real& x, const Real& e) {
  using std::pow;
  if (x == 0) return Real(0);
  return pow(x, e);
}

template <class Real>
Complex<Real> unit_exp(const Real& theta) {
  using std::cos;
  using std::sin;
  return {cos(theta), sin(theta)};
}

}  // namespace

std::string to_string(Family f) {
  switch (f) {
    case Family::FourierExtension: return "FourierExtension";
    case Family::AugmentedFourier: return "AugmentedFourier";
    case Family::WeightedLegendre: return "WeightedLegendre";
    case Family::AugmentedOrthonormal: return "AugmentedOrthonormal";
  }
  return "?";
}

template <class Real>
Real PowerLaw::amplitude() const {
  using std::sqrt;
  return 1 / sqrt(zeta<Real>(2 * power));
}

template <class Real>
Real PowerLaw::coefficient(long n) const {
  using std::pow;
  if (n < 1) throw InvalidArgument("power-law coefficient index must be >= 1");
  return amplitude<Real>() / pow(Real(n), power);
}

FrameSpec FrameSpec::fourier_extension(double T) {
  if (!(T > 1.0) || !std::isfinite(T))
    throw InvalidArgument("FourierExtension needs T > 1, got " + shortest(T));
  FrameSpec s;
  s.family_ = Family::FourierExtension;
  s.T_ = T;
  return s;
}

FrameSpec FrameSpec::augmented_fourier(int K) {
  if (K < 1) throw InvalidArgument("AugmentedFourier needs K >= 1, got " + std::to_string(K));
  FrameSpec s;
  s.family_ = Family::AugmentedFourier;
  s.K_ = K;
  return s;
}

FrameSpec FrameSpec::weighted_legendre(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw InvalidArgument("WeightedLegendre needs alpha in (0,1), got " + shortest(alpha));
  FrameSpec s;
  s.family_ = Family::WeightedLegendre;
  s.alpha_ = alpha;
  return s;
}

FrameSpec FrameSpec::augmented_orthonormal(PowerLaw law) {
  if (law.power < 1)
    throw InvalidArgument("AugmentedOrthonormal needs a power >= 1, got " +
                          std::to_string(law.power));
  FrameSpec s;
  s.family_ = Family::AugmentedOrthonormal;
  s.law_ = law;
  return s;
}

Interval FrameSpec::domain() const {
  if (family_ == Family::FourierExtension) return {-1.0 / T_, 1.0 / T_};
  return {-1.0, 1.0};
}

double FrameSpec::lower_frame_bound() const { return 1.0; }

double FrameSpec::upper_frame_bound() const {
  switch (family_) {
    case Family::FourierExtension: return 1.0;
    case Family::AugmentedFourier: return 2.0;
    case Family::WeightedLegendre: return 1.0 + std::pow(2.0, 2.0 * alpha_);
    case Family::AugmentedOrthonormal: return 2.0;
  }
  return 0.0;
}

std::string FrameSpec::token() const {
  switch (family_) {
    case Family::FourierExtension: return "fe";
    case Family::AugmentedFourier: return "augf";
    case Family::WeightedLegendre: return "wleg";
    case Family::AugmentedOrthonormal: return "augortho";
  }
  return "?";
}

std::string FrameSpec::params() const {
  switch (family_) {
    case Family::FourierExtension: return "T=" + shortest(T_);
    case Family::AugmentedFourier: return "K=" + std::to_string(K_);
    case Family::WeightedLegendre: return "alpha=" + shortest(alpha_);
    case Family::AugmentedOrthonormal: return "p=" + std::to_string(law_.power);
  }
  return "";
}

std::ostream& operator<<(std::ostream& os, const FrameIndex& idx) {
  using Tag = FrameIndex::Tag;
  switch (idx.tag) {
    case Tag::fourier: return os << "fourier(" << idx.n << ")";
    case Tag::legendre: return os << "legendre(" << idx.n << ")";
    case Tag::weighted: return os << "weighted(" << idx.n << ")";
    case Tag::extra: return os << "extra";
    case Tag::ortho: return os << "ortho(" << idx.n << ")";
  }
  return os;
}

std::string to_string(const FrameIndex& idx) {
  std::ostringstream os;
  os << idx;
  return os.str();
}

bool is_admissible(const FrameSpec& spec, long N) {
  switch (spec.family()) {
    case Family::FourierExtension:
    case Family::WeightedLegendre: return N >= 2 && N % 2 == 0;
    case Family::AugmentedFourier: return N >= spec.K() && (N - spec.K()) % 2 == 0;
    case Family::AugmentedOrthonormal: return N >= 1;
  }
  return false;
}

std::string admissibility_rule(const FrameSpec& spec) {
  switch (spec.family()) {
    case Family::FourierExtension: return "FourierExtension requires N even and N >= 2";
    case Family::WeightedLegendre: return "WeightedLegendre requires N even and N >= 2";
    case Family::AugmentedFourier:
      return "AugmentedFourier requires N >= K and N - K even (K = " + std::to_string(spec.K()) +
             ")";
    case Family::AugmentedOrthonormal: return "AugmentedOrthonormal requires N >= 1";
  }
  return "";
}

void require_admissible(const FrameSpec& spec, long N) {
  if (!is_admissible(spec, N))
    throw InvalidArgument("inadmissible truncation N = " + std::to_string(N) + ": " +
                          admissibility_rule(spec));
}

namespace {

// k-th entry (0-based) of the nested Fourier order -1, 0, -2, 1, -3, 2, ...
long nested_fourier(long k) { return k % 2 == 0 ? -(k / 2 + 1) : k / 2; }

}  // namespace

std::vector<FrameIndex> index_set(const FrameSpec& spec, long N) {
  require_admissible(spec, N);
  std::vector<FrameIndex> out;
  out.reserve(static_cast<std::size_t>(N));
  switch (spec.family()) {
    case Family::FourierExtension:
      for (long k = 0; k < N; ++k) out.push_back(FrameIndex::fourier(nested_fourier(k)));
      break;
    case Family::AugmentedFourier:
      for (long k = 1; k <= spec.K(); ++k) out.push_back(FrameIndex::legendre(k));
      for (long k = 0; k < N - spec.K(); ++k) out.push_back(FrameIndex::fourier(nested_fourier(k)));
      break;
    case Family::WeightedLegendre:
      for (long n = 1; n <= N / 2; ++n) {
        out.push_back(FrameIndex::legendre(n));
        out.push_back(FrameIndex::weighted(n));
      }
      break;
    case Family::AugmentedOrthonormal:
      out.push_back(FrameIndex::extra());
      for (long n = 1; n < N; ++n) out.push_back(FrameIndex::ortho(n));
      break;
  }
  return out;
}

bool is_legal(const FrameSpec& spec, const FrameIndex& idx) {
  using Tag = FrameIndex::Tag;
  switch (spec.family()) {
    case Family::FourierExtension: return idx.tag == Tag::fourier;
    case Family::AugmentedFourier:
      return idx.tag == Tag::fourier || (idx.tag == Tag::legendre && idx.n >= 1 && idx.n <= spec.K());
    case Family::WeightedLegendre:
      return (idx.tag == Tag::legendre || idx.tag == Tag::weighted) && idx.n >= 1;
    case Family::AugmentedOrthonormal:
      return idx.tag == Tag::extra || (idx.tag == Tag::ortho && idx.n >= 1);
  }
  return false;
}

namespace {

void require_legal(const FrameSpec& spec, const FrameIndex& idx) {
  if (!is_legal(spec, idx))
    throw InvalidArgument("index " + to_string(idx) + " is not an element of " +
                          to_string(spec.family()));
}

}  // namespace

long legendre_degree(const FrameSpec& spec, const FrameIndex& idx) {
  require_legal(spec, idx);
  using Tag = FrameIndex::Tag;
  if (idx.tag != Tag::legendre && idx.tag != Tag::weighted)
    throw InvalidArgument("index " + to_string(idx) + " carries no polynomial degree");
  return spec.family() == Family::AugmentedFourier ? idx.n : idx.n - 1;
}

template <class Real>
void orthonormal_legendre_all(long max_degree, const Real& t, std::span<Real> out) {
  using std::sqrt;
  if (max_degree < 0) return;
  // Standard recurrence for P_k, scaled at the end.
  Real pm1(1), p = t;
  out[0] = pm1;
  if (max_degree >= 1) out[1] = p;
  for (long k = 1; k < max_degree; ++k) {
    Real next = ((2 * k + 1) * t * p - k * pm1) / (k + 1);
    pm1 = p;
    p = next;
    out[k + 1] = p;
  }
  for (long k = 0; k <= max_degree; ++k) out[k] *= sqrt(Real(2 * k + 1) / 2);
}

template <class Real>
Real orthonormal_legendre(long degree, const Real& t) {
  if (degree < 0) throw InvalidArgument("Legendre degree must be >= 0");
  std::vector<Real> v(static_cast<std::size_t>(degree + 1));
  orthonormal_legendre_all<Real>(degree, t, v);
  return v.back();
}

namespace {

template <class Real>
void require_in_domain(const FrameSpec& spec, const Real& t) {
  if (!spec.has_pointwise_values())
    throw InvalidArgument("AugmentedOrthonormal elements have no pointwise values");
  const Interval d = spec.domain();
  const double slack = 4 * std::numeric_limits<double>::epsilon();
  const double td = to_double(t);
  if (!(td >= d.lo - slack * std::abs(d.lo) && td <= d.hi + slack * std::abs(d.hi))) {
    std::ostringstream os;
    os << "point t = " << td << " lies outside the closed domain [" << d.lo << ", " << d.hi << "]";
    throw InvalidArgument(os.str());
  }
}

template <class Real>
Complex<Real> fourier_value(long n, const Real& t) {
  using std::sqrt;
  return unit_exp<Real>(pi<Real>() * Real(n) * t) / sqrt(Real(2));
}

}  // namespace

template <class Real>
Complex<Real> evaluate(const FrameSpec& spec, const FrameIndex& idx, const Real& t) {
  require_legal(spec, idx);
  require_in_domain(spec, t);
  using Tag = FrameIndex::Tag;
  switch (idx.tag) {
    case Tag::fourier: return fourier_value(idx.n, t);
    case Tag::legendre: return {orthonormal_legendre(legendre_degree(spec, idx), t), Real(0)};
    case Tag::weighted:
      return {real_pow(1 + t, Real(spec.alpha())) * orthonormal_legendre(legendre_degree(spec, idx), t),
              Real(0)};
    default: break;
  }
  throw InvalidArgument("index " + to_string(idx) + " has no pointwise value");
}

template <class Real>
void evaluate_all(const FrameSpec& spec, std::span<const FrameIndex> indices, const Real& t,
                  std::span<Complex<Real>> out) {
  if (out.size() < indices.size()) throw InvalidArgument("evaluate_all: output span too short");
  require_in_domain(spec, t);
  long max_degree = -1;
  for (const auto& idx : indices) {
    require_legal(spec, idx);
    if (idx.tag == FrameIndex::Tag::legendre || idx.tag == FrameIndex::Tag::weighted)
      max_degree = std::max(max_degree, legendre_degree(spec, idx));
  }
  std::vector<Real> leg(static_cast<std::size_t>(max_degree + 1));
  if (max_degree >= 0) orthonormal_legendre_all<Real>(max_degree, t, leg);
  Real weight(0);
  if (spec.family() == Family::WeightedLegendre) weight = real_pow(1 + t, Real(spec.alpha()));
  // Multiprecision: powers of e^{i pi t} instead of one sine/cosine per element.
  std::vector<Complex<Real>> powers;
  if constexpr (is_multiprecision_v<Real>) {
    long max_n = 0;
    for (const auto& idx : indices)
      if (idx.tag == FrameIndex::Tag::fourier) max_n = std::max(max_n, std::labs(idx.n));
    if (max_n > 0) {
      using std::sqrt;
      powers.resize(static_cast<std::size_t>(max_n + 1));
      powers[0] = Complex<Real>(1 / sqrt(Real(2)), Real(0));
      const Complex<Real> z = unit_exp<Real>(pi<Real>() * t);
      for (long k = 1; k <= max_n; ++k) powers[k] = powers[k - 1] * z;
    }
  }
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto& idx = indices[i];
    switch (idx.tag) {
      case FrameIndex::Tag::fourier:
        if (!powers.empty())
          out[i] = idx.n >= 0 ? powers[idx.n] : std::conj(powers[-idx.n]);
        else
          out[i] = fourier_value(idx.n, t);
        break;
      case FrameIndex::Tag::legendre: out[i] = Complex<Real>(leg[legendre_degree(spec, idx)], Real(0)); break;
      case FrameIndex::Tag::weighted:
        out[i] = Complex<Real>(weight * leg[legendre_degree(spec, idx)], Real(0));
        break;
      default: throw InvalidArgument("index " + to_string(idx) + " has no pointwise value");
    }
  }
}

namespace {

/// <psi_k, phi_n> = int sqrt(k+1/2) P_k(t) 2^{-1/2} e^{-i pi n t} dt over (-1,1),
/// folded over the symmetric Gauss-Legendre rule so the parity-zero part is
/// exactly zero.
template <class Real>
Complex<Real> legendre_fourier(long k, long n) {
  using std::cos;
  using std::sin;
  using std::sqrt;
  const int bits = effective_bits<Real>();
  const int m = static_cast<int>(std::max(2 * k, 4 * std::labs(n)) + 16 + (bits + 3) / 4);
  const auto rule = cached_gauss_legendre<Real>(m);
  const Real w_pi = pi<Real>() * Real(n);
  std::vector<Real> leg(static_cast<std::size_t>(k + 1));
  Real acc(0);
  for (int i = m / 2; i < m; ++i) {
    const Real& x = rule->nodes[i];
    orthonormal_legendre_all<Real>(k, x, leg);
    Real w = rule->weights[i];
    if (m % 2 == 1 && i == m / 2) w /= 2;  // centre node counted once after doubling
    acc += w * leg[k] * (k % 2 == 0 ? cos(w_pi * x) : sin(w_pi * x));
  }
  acc *= 2 / sqrt(Real(2));
  // even k: real part sum of cos; odd k: e^{-i theta} gives -i sin.
  if (k % 2 == 0) return {acc, Real(0)};
  return {Real(0), -acc};
}

/// int (1+t)^beta phi_a phi_b dt for orthonormal Legendre degrees a, b.
template <class Real>
Real weighted_legendre_pair(long a, long b, double beta) {
  if (a > b) std::swap(a, b);
  const int m = static_cast<int>((a + b + 1) / 2) + 1;
  const auto rule = cached_gauss_jacobi<Real>(m, 0.0, beta);
  const long dmax = std::max(a, b);
  std::vector<Real> leg(static_cast<std::size_t>(dmax + 1));
  Real acc(0);
  for (int i = 0; i < m; ++i) {
    orthonormal_legendre_all<Real>(dmax, rule->nodes[i], leg);
    acc += rule->weights[i] * leg[a] * leg[b];
  }
  return acc;
}

// Quadrature-based entries for double are accumulated in long double so the
// rounded result stays within a few ulps.
template <class Real>
using Work = std::conditional_t<std::is_same_v<Real, double>, long double, Real>;

template <class Real>
Complex<Real> fourier_extension_pair(double T, long m, long n) {
  using std::sin;
  const Real Tr(T);
  if (m == n) return {1 / Tr, Real(0)};
  const Real d(n - m);
  const Real arg = pi<Real>() * d;
  return {sin(arg / Tr) / arg, Real(0)};
}

}  // namespace

template <class Real>
Complex<Real> pair_inner_product(const FrameSpec& spec, const FrameIndex& i, const FrameIndex& j) {
  require_legal(spec, i);
  require_legal(spec, j);
  using Tag = FrameIndex::Tag;
  const Complex<Real> zero(Real(0), Real(0));
  const Complex<Real> one(Real(1), Real(0));
  switch (spec.family()) {
    case Family::FourierExtension: return fourier_extension_pair<Real>(spec.T(), i.n, j.n);
    case Family::AugmentedFourier: {
      if (i.tag == j.tag) return i.n == j.n ? one : zero;
      // <phi_j, phi_i> with one Legendre and one Fourier element.
      const bool j_poly = j.tag == Tag::legendre;
      const auto v = legendre_fourier<Work<Real>>(j_poly ? j.n : i.n, j_poly ? i.n : j.n);
      const Complex<Real> c(Real(v.real()), Real(v.imag()));
      return j_poly ? c : std::conj(c);
    }
    case Family::WeightedLegendre: {
      const long a = legendre_degree(spec, i), b = legendre_degree(spec, j);
      if (i.tag == Tag::legendre && j.tag == Tag::legendre) return a == b ? one : zero;
      const double beta = (i.tag == Tag::weighted && j.tag == Tag::weighted) ? 2 * spec.alpha()
                                                                              : spec.alpha();
      return {Real(weighted_legendre_pair<Work<Real>>(a, b, beta)), Real(0)};
    }
    case Family::AugmentedOrthonormal: {
      if (i.tag == Tag::extra && j.tag == Tag::extra) return one;
      if (i.tag == Tag::ortho && j.tag == Tag::ortho) return i.n == j.n ? one : zero;
      const long n = i.tag == Tag::ortho ? i.n : j.n;
      return {spec.law().coefficient<Real>(n), Real(0)};
    }
  }
  return zero;
}

template <class Real>
Real element_norm(const FrameSpec& spec, const FrameIndex& idx) {
  using std::sqrt;
  return sqrt(pair_inner_product<Real>(spec, idx, idx).real());
}

#define FRAMEWARD_INSTANTIATE(Real)                                                            \
  template Real PowerLaw::amplitude<Real>() const;                                            \
  template Real PowerLaw::coefficient<Real>(long) const;                                      \
  template Real orthonormal_legendre<Real>(long, const Real&);                                \
  template void orthonormal_legendre_all<Real>(long, const Real&, std::span<Real>);           \
  template Complex<Real> evaluate<Real>(const FrameSpec&, const FrameIndex&, const Real&);    \
  template void evaluate_all<Real>(const FrameSpec&, std::span<const FrameIndex>, const Real&, \
                                   std::span<Complex<Real>>);                                  \
  template Complex<Real> pair_inner_product<Real>(const FrameSpec&, const FrameIndex&,        \
                                                  const FrameIndex&);                          \
  template Real element_norm<Real>(const FrameSpec&, const FrameIndex&);

FRAMEWARD_INSTANTIATE(double)
FRAMEWARD_INSTANTIATE(mpreal)

#undef FRAMEWARD_INSTANTIATE

}  // namespace frameward
