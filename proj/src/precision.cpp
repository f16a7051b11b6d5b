#include "frameward/precision.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace frameward {

namespace {

unsigned digits10_for_bits(int bits) {
  // digits10 -> bits conversion in the backend rounds up, so this never
  // undershoots the request.
  return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1;
}

}  // namespace

WorkingPrecision::WorkingPrecision(int bits)
    : saved_digits10_(mpreal::default_precision()), bits_(bits) {
  mpreal::default_precision(digits10_for_bits(bits));
}

WorkingPrecision::~WorkingPrecision() { mpreal::default_precision(saved_digits10_); }

int current_mp_bits() {
  mpreal probe;
  return static_cast<int>(mpfr_get_prec(probe.backend().data()));
}

template <>
double pi<double>() {
  return std::numbers::pi;
}

template <>
long double pi<long double>() {
  return std::numbers::pi_v<long double>;
}

template <>
mpreal pi<mpreal>() {
  mpreal r;
  mpfr_const_pi(r.backend().data(), MPFR_RNDN);
  return r;
}

template <>
std::string to_decimal<double>(const double& x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

template <>
std::string to_decimal<mpreal>(const mpreal& x) {
  const auto bits = mpfr_get_prec(x.backend().data());
  std::ostringstream os;
  os.precision(static_cast<std::streamsize>(std::ceil(bits * 0.30102999566398120)) + 2);
  os << std::scientific << x;
  return os.str();
}

template <>
mpreal zeta<mpreal>(int p) {
  mpreal r;
  mpfr_zeta_ui(r.backend().data(), static_cast<unsigned long>(p), MPFR_RNDN);
  return r;
}

template <>
mpreal zeta_tail<mpreal>(int p, long first) {
  const int target = current_mp_bits();
  mpreal out;
  {
    const int guard = 64 + static_cast<int>((p - 1) * std::log2(static_cast<double>(first) + 1.0));
    WorkingPrecision wp(target + guard);
    mpreal acc = zeta<mpreal>(p);
    for (long n = 1; n < first; ++n) acc -= pow(mpreal(n), -p);
    out = acc;
  }
  mpreal rounded;  // caller's precision
  mpfr_set(rounded.backend().data(), out.backend().data(), MPFR_RNDN);
  return rounded;
}

template <>
double zeta<double>(int p) {
  WorkingPrecision wp(128);
  return to_double(zeta<mpreal>(p));
}

template <>
double zeta_tail<double>(int p, long first) {
  WorkingPrecision wp(128);
  return to_double(zeta_tail<mpreal>(p, first));
}

}  // namespace frameward
