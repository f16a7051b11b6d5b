#pragma once

// Scalar types and working-precision control.
//
// Every numerical routine in frameward is templated on a real type `Real`,
// instantiated for `double` and for `mpreal` (MPFR, runtime precision).
// Complex quantities are `std::complex<Real>`.

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <type_traits>

namespace frameward {

using mpreal = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                             boost::multiprecision::et_off>;

template <class Real>
using Complex = std::complex<Real>;

template <class Real>
using CMatrix = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <class Real>
using CVector = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, 1>;
template <class Real>
using RMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
template <class Real>
using RVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

template <class Real>
inline constexpr bool is_multiprecision_v = std::is_same_v<Real, mpreal>;

/// Binary digits carried by `double`.
inline constexpr int kDoubleBits = std::numeric_limits<double>::digits;

/// RAII scope that sets the default MPFR precision for newly created
/// `mpreal` values.  Restores the previous setting on exit.  The MPFR
/// default lives in process-wide state, so multiprecision work must not be
/// run from several threads with different precisions at once.
class WorkingPrecision {
public:
  explicit WorkingPrecision(int bits);
  ~WorkingPrecision();
  WorkingPrecision(const WorkingPrecision&) = delete;
  WorkingPrecision& operator=(const WorkingPrecision&) = delete;

  int bits() const { return bits_; }

private:
  unsigned saved_digits10_;
  int bits_;
};

/// Bits of the current default `mpreal` precision.
int current_mp_bits();

/// Effective bits of `Real` in the current scope.
template <class Real>
int effective_bits() {
  if constexpr (is_multiprecision_v<Real>)
    return current_mp_bits();
  else
    return std::numeric_limits<Real>::digits;
}

template <class Real>
Real pi();

template <class Real>
Real pow2(int e) {
  using std::ldexp;
  using boost::multiprecision::ldexp;
  return ldexp(Real(1), e);
}

template <class Real>
double to_double(const Real& x) {
  if constexpr (is_multiprecision_v<Real>)
    return x.template convert_to<double>();
  else
    return static_cast<double>(x);
}

template <class Real>
Complex<double> to_double(const Complex<Real>& z) {
  return {to_double(z.real()), to_double(z.imag())};
}

/// Decimal rendering with enough digits to round-trip at the value's
/// precision (17 significant digits for double).
template <class Real>
std::string to_decimal(const Real& x);

/// Riemann zeta at an integer argument p >= 2.
template <class Real>
Real zeta(int p);

/// sum_{n >= first} n^{-p}, p >= 2, first >= 1.  Computed without the
/// cancellation of zeta(p) minus a partial sum by using extra guard bits.
template <class Real>
Real zeta_tail(int p, long first);

}  // namespace frameward
