#pragma once

// Target functions f and the built-in catalog.

#include "frameward/frames.hpp"
#include "frameward/quadrature.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace frameward {

/// A function to approximate.  Pointwise targets carry evaluators for both
/// scalar types; coefficient-space targets (for AugmentedOrthonormal) carry a
/// power law b_n over the orthonormal basis instead.
struct TargetFunction {
  std::string id;
  std::function<Complex<double>(const double&)> eval_double;
  std::function<Complex<mpreal>(const mpreal&)> eval_mp;
  /// Weak singularity at the left endpoint: grade quadrature panels there.
  bool singular_left = false;
  /// Points of reduced smoothness inside the domain.
  std::vector<double> breakpoints;
  std::optional<PowerLaw> law;

  bool pointwise() const { return static_cast<bool>(eval_double); }

  template <class Real>
  Complex<Real> operator()(const Real& t) const;

  template <class Real>
  Evaluator<Real> evaluator() const {
    return [this](const Real& t) { return (*this)(t); };
  }

  /// Build from a generic callable accepting double and mpreal.
  template <class F>
  static TargetFunction from(std::string id, F f) {
    TargetFunction tf;
    tf.id = std::move(id);
    tf.eval_double = [f](const double& t) { return Complex<double>(f(t)); };
    tf.eval_mp = [f](const mpreal& t) { return Complex<mpreal>(f(t)); };
    return tf;
  }

  /// Coefficient-space target sum_n b_n e_n.
  static TargetFunction coefficients(std::string id, PowerLaw law);
};

/// Catalog ids: exp, runge16, runge25, abs5, pole, mixed, synthetic-p51.
TargetFunction make_target(const std::string& id);
std::vector<std::string> target_catalog();

/// Whether f can be approximated in the frame (pointwise vs coefficient space).
bool compatible(const FrameSpec& spec, const TargetFunction& f);
void require_compatible(const FrameSpec& spec, const TargetFunction& f);

/// ||f|| on the domain (L^2 or l^2 for coefficient targets).
template <class Real>
Real target_norm(const FrameSpec& spec, const TargetFunction& f, double tol);

/// Quadrature options suited to f on the spec's domain.
AdaptiveOptions quadrature_options(const FrameSpec& spec, const TargetFunction& f);

}  // namespace frameward
