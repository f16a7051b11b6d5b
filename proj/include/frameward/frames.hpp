#pragma once

// Frame families, their nested index sets, pointwise evaluation and exact
// pairwise inner products.
//
// Four families are supported, all on one-dimensional domains:
//
//   FourierExtension     phi_n(t) = 2^{-1/2} e^{i pi n t} restricted to
//                        (-1/T, 1/T), T > 1.  Tight, A = B = 1.
//   AugmentedFourier     2^{-1/2} e^{i n pi t} on (-1,1) plus the K
//                        orthonormal Legendre polynomials of degree 1..K.
//                        A = 1, B = 2.
//   WeightedLegendre     orthonormal Legendre polynomials phi_n (degree
//                        n-1) plus psi_n = (1+t)^alpha phi_n.
//                        A = 1, B = 1 + 2^{2 alpha}.
//   AugmentedOrthonormal an abstract orthonormal basis {e_n} plus one unit
//                        vector g with coefficients c_n = zeta(2p)^{-1/2} n^{-p}.
//                        Lives in coefficient space; no pointwise values.
//                        A = 1, B = 2.

#include "frameward/precision.hpp"

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace frameward {

enum class Family : std::uint8_t {
  FourierExtension,
  AugmentedFourier,
  WeightedLegendre,
  AugmentedOrthonormal,
};

std::string to_string(Family f);

struct Interval {
  double lo = -1.0;
  double hi = 1.0;
  double length() const { return hi - lo; }
  bool contains(double t) const { return lo <= t && t <= hi; }
};

/// Unit-norm power-law coefficient sequence a_n = zeta(2p)^{-1/2} n^{-p},
/// n = 1, 2, ...
struct PowerLaw {
  int power = 2;

  template <class Real>
  Real amplitude() const;
  template <class Real>
  Real coefficient(long n) const;
};

/// Immutable description of a frame family and its parameters.
class FrameSpec {
public:
  static FrameSpec fourier_extension(double T);
  static FrameSpec augmented_fourier(int K);
  static FrameSpec weighted_legendre(double alpha);
  static FrameSpec augmented_orthonormal(PowerLaw law = PowerLaw{2});

  Family family() const { return family_; }
  double T() const { return T_; }
  int K() const { return K_; }
  double alpha() const { return alpha_; }
  const PowerLaw& law() const { return law_; }

  /// Omega.  For the coefficient-space family this is nominal.
  Interval domain() const;

  /// Frame bounds (A, B) of the infinite frame.
  double lower_frame_bound() const;
  double upper_frame_bound() const;

  /// True when every Gram entry is real.
  bool real_gram() const { return family_ != Family::AugmentedFourier; }

  /// True when elements have pointwise values on the domain.
  bool has_pointwise_values() const { return family_ != Family::AugmentedOrthonormal; }

  /// Short family token used on the command line: fe, augf, wleg, augortho.
  std::string token() const;
  /// "T=2", "K=4", "alpha=0.5", "p=2".
  std::string params() const;

  bool operator==(const FrameSpec&) const = default;

private:
  FrameSpec() = default;

  Family family_ = Family::FourierExtension;
  double T_ = 2.0;
  int K_ = 0;
  double alpha_ = 0.5;
  PowerLaw law_{};
};

/// Index of one frame element.
///
///   fourier(n)   Fourier exponential, n any integer
///   legendre(k)  polynomial element: degree k in AugmentedFourier,
///                degree k-1 (k >= 1) in WeightedLegendre
///   weighted(n)  (1+t)^alpha times legendre(n), WeightedLegendre only
///   extra        the added vector g of AugmentedOrthonormal
///   ortho(n)     basis vector e_n of AugmentedOrthonormal, n >= 1
struct FrameIndex {
  enum class Tag : std::uint8_t { fourier, legendre, weighted, extra, ortho };
  Tag tag = Tag::fourier;
  long n = 0;

  static FrameIndex fourier(long n) { return {Tag::fourier, n}; }
  static FrameIndex legendre(long k) { return {Tag::legendre, k}; }
  static FrameIndex weighted(long n) { return {Tag::weighted, n}; }
  static FrameIndex extra() { return {Tag::extra, 0}; }
  static FrameIndex ortho(long n) { return {Tag::ortho, n}; }

  bool operator==(const FrameIndex&) const = default;
};

std::ostream& operator<<(std::ostream& os, const FrameIndex& idx);
std::string to_string(const FrameIndex& idx);

/// Whether a truncation of size N exists for the family.
bool is_admissible(const FrameSpec& spec, long N);

/// Human-readable rule for admissible N.
std::string admissibility_rule(const FrameSpec& spec);

/// Throws InvalidArgument naming the family rule when N is inadmissible.
void require_admissible(const FrameSpec& spec, long N);

/// Ordered index list of the truncated frame Phi_N.  Orders are chosen so
/// that index_set(N) is a prefix of index_set(N') for admissible N <= N':
///
///   FourierExtension: -1, 0, -2, 1, -3, 2, ...   (as a set: -N/2 .. N/2-1)
///   AugmentedFourier: legendre 1..K, then the Fourier order above
///   WeightedLegendre: legendre 1, weighted 1, legendre 2, weighted 2, ...
///   AugmentedOrthonormal: extra, ortho 1, ortho 2, ...
std::vector<FrameIndex> index_set(const FrameSpec& spec, long N);

/// Whether idx names an element of the family.
bool is_legal(const FrameSpec& spec, const FrameIndex& idx);

/// Polynomial degree carried by a legendre/weighted index.
long legendre_degree(const FrameSpec& spec, const FrameIndex& idx);

/// Orthonormal Legendre polynomial sqrt(k+1/2) P_k(t), by three-term
/// recurrence.
template <class Real>
Real orthonormal_legendre(long degree, const Real& t);

/// Values of the orthonormal Legendre polynomials of degree 0..max_degree
/// at t, written to out (size max_degree+1).
template <class Real>
void orthonormal_legendre_all(long max_degree, const Real& t, std::span<Real> out);

/// Pointwise value of a frame element.  Throws InvalidArgument if t is
/// outside the closed domain or the family has no pointwise values.
template <class Real>
Complex<Real> evaluate(const FrameSpec& spec, const FrameIndex& idx, const Real& t);

/// Values of several elements at one point, sharing recurrences.
template <class Real>
void evaluate_all(const FrameSpec& spec, std::span<const FrameIndex> indices, const Real& t,
                  std::span<Complex<Real>> out);

/// L^2(Omega) inner product <phi_j, phi_i> = int phi_j conj(phi_i), exact
/// up to rounding at the working precision of Real.  Satisfies
/// pair_inner_product(i, j) == conj(pair_inner_product(j, i)).
template <class Real>
Complex<Real> pair_inner_product(const FrameSpec& spec, const FrameIndex& i, const FrameIndex& j);

/// L^2 norm of a single element.
template <class Real>
Real element_norm(const FrameSpec& spec, const FrameIndex& idx);

}  // namespace frameward
