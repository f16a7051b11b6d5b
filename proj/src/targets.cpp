#include "frameward/targets.hpp"

#include "frameward/errors.hpp"

#include <algorithm>
#include <cmath>

namespace frameward {

template <>
Complex<double> TargetFunction::operator()(const double& t) const {
  if (!eval_double) throw InvalidArgument("target '" + id + "' has no pointwise values");
  return eval_double(t);
}

template <>
Complex<mpreal> TargetFunction::operator()(const mpreal& t) const {
  if (!eval_mp) throw InvalidArgument("target '" + id + "' has no pointwise values");
  return eval_mp(t);
}

TargetFunction TargetFunction::coefficients(std::string id, PowerLaw law) {
  TargetFunction tf;
  tf.id = std::move(id);
  tf.law = law;
  return tf;
}

TargetFunction make_target(const std::string& id) {
  using std::abs;
  using std::cos;
  using std::exp;
  using std::sin;
  using std::sqrt;
  if (id == "exp") return TargetFunction::from(id, [](const auto& t) { return exp(t); });
  if (id == "runge16")
    return TargetFunction::from(id, [](const auto& t) { return 1 / (1 + 16 * t * t); });
  if (id == "runge25")
    return TargetFunction::from(id, [](const auto& t) { return 1 / (1 + 25 * t * t); });
  if (id == "abs5") {
    auto tf = TargetFunction::from(id, [](const auto& t) {
      const auto a = abs(t);
      return a * a * a * a * a;
    });
    tf.breakpoints = {0.0};
    return tf;
  }
  if (id == "pole") return TargetFunction::from(id, [](const auto& t) { return 1 / (10 - 9 * t); });
  if (id == "mixed") {
    auto tf = TargetFunction::from(id, [](const auto& t) {
      using T = std::decay_t<decltype(t)>;
      const T s = 1 + t;
      return exp(sin(3 * t + T(0.5))) * (s > 0 ? sqrt(s) : T(0)) + cos(5 * t);
    });
    tf.singular_left = true;
    return tf;
  }
  if (id == "synthetic-p51") return TargetFunction::coefficients(id, PowerLaw{1});
  throw InvalidArgument("unknown target function '" + id + "' (known: exp, runge16, runge25, abs5, "
                        "pole, mixed, synthetic-p51)");
}

std::vector<std::string> target_catalog() {
  return {"exp", "runge16", "runge25", "abs5", "pole", "mixed", "synthetic-p51"};
}

bool compatible(const FrameSpec& spec, const TargetFunction& f) {
  if (spec.family() == Family::AugmentedOrthonormal) return f.law.has_value();
  return f.pointwise();
}

void require_compatible(const FrameSpec& spec, const TargetFunction& f) {
  if (!compatible(spec, f))
    throw InvalidArgument("target '" + f.id + "' cannot be used with the " +
                          to_string(spec.family()) + " frame");
}

AdaptiveOptions quadrature_options(const FrameSpec& spec, const TargetFunction& f) {
  AdaptiveOptions opts;
  opts.graded_left = f.singular_left || spec.family() == Family::WeightedLegendre;
  const Interval d = spec.domain();
  for (double b : f.breakpoints)
    if (b > d.lo && b < d.hi) opts.breakpoints.push_back(b);
  return opts;
}

template <class Real>
Real target_norm(const FrameSpec& spec, const TargetFunction& f, double tol) {
  require_compatible(spec, f);
  if (f.law) return Real(1);  // power laws are normalized
  return l2_norm<Real>(f.evaluator<Real>(), spec.domain(), tol, quadrature_options(spec, f));
}

template double target_norm<double>(const FrameSpec&, const TargetFunction&, double);
template mpreal target_norm<mpreal>(const FrameSpec&, const TargetFunction&, double);

}  // namespace frameward
