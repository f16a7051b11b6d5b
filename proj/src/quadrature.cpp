#include "frameward/quadrature.hpp"

#include "frameward/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <queue>
#include <shared_mutex>
#include <sstream>
#include <tuple>

namespace frameward {

namespace {

template <class Real>
Real gamma_fn(const Real& x) {
  if constexpr (is_multiprecision_v<Real>)
    return boost::multiprecision::tgamma(x);
  else
    return std::tgamma(x);
}

/// Three-term recurrence of the orthonormal Jacobi polynomials:
///   sb[k+1] p_{k+1} = (x - a[k]) p_k - sb[k] p_{k-1},  p_0 = 1/sqrt(mu0).
template <class Real>
struct JacobiRecurrence {
  std::vector<Real> a;   // k = 0..n-1
  std::vector<Real> sb;  // k = 0..n, sb[0] unused
  Real p0;

  JacobiRecurrence(int n, double alpha_d, double beta_d) : a(n), sb(n + 1) {
    using std::pow;
    using std::sqrt;
    const Real alpha(alpha_d), beta(beta_d);
    const Real ab = alpha + beta;
    for (int k = 0; k < n; ++k) {
      if (k == 0) {
        a[0] = (beta - alpha) / (ab + 2);
      } else {
        const Real s = 2 * Real(k) + ab;
        a[k] = (beta * beta - alpha * alpha) / (s * (s + 2));
      }
    }
    for (int k = 1; k <= n; ++k) {
      const Real kk(k);
      const Real s = 2 * kk + ab;
      Real b;
      if (k == 1)
        b = 4 * (1 + alpha) * (1 + beta) / ((2 + ab) * (2 + ab) * (3 + ab));
      else
        b = 4 * kk * (kk + alpha) * (kk + beta) * (kk + ab) / (s * s * (s + 1) * (s - 1));
      sb[k] = sqrt(b);
    }
    const Real mu0 = pow(Real(2), ab + 1) * gamma_fn(alpha + 1) * gamma_fn(beta + 1) /
                     gamma_fn(ab + 2);
    p0 = 1 / sqrt(mu0);
  }

  /// p_n(x) and p_n'(x).
  void eval(int n, const Real& x, Real& pn, Real& dpn) const {
    Real pm1(0), p = p0, dpm1(0), dp(0);
    for (int k = 0; k < n; ++k) {
      const Real xa = x - a[k];
      const Real pnext = (xa * p - (k > 0 ? sb[k] * pm1 : Real(0))) / sb[k + 1];
      const Real dnext = (p + xa * dp - (k > 0 ? sb[k] * dpm1 : Real(0))) / sb[k + 1];
      pm1 = p;
      p = pnext;
      dpm1 = dp;
      dp = dnext;
    }
    pn = p;
    dpn = dp;
  }

  /// sum_{k<n} p_k(x)^2
  Real christoffel_sum(int n, const Real& x) const {
    Real pm1(0), p = p0, s = p0 * p0;
    for (int k = 0; k + 1 < n; ++k) {
      const Real pnext = ((x - a[k]) * p - (k > 0 ? sb[k] * pm1 : Real(0))) / sb[k + 1];
      pm1 = p;
      p = pnext;
      s += p * p;
    }
    return s;
  }
};

/// Golub-Welsch eigenvalues in double, used as Newton starting points.
std::vector<double> initial_nodes(int n, double alpha, double beta) {
  JacobiRecurrence<double> rec(n, alpha, beta);
  Eigen::VectorXd diag(n), sub(std::max(n - 1, 0));
  for (int k = 0; k < n; ++k) diag(k) = rec.a[k];
  for (int k = 1; k < n; ++k) sub(k - 1) = rec.sb[k];
  if (n == 1) return {diag(0)};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = es.eigenvalues()(i);
  return out;
}

template <class Real>
QuadRule<Real> build_rule(int n, double alpha, double beta, RuleKind kind) {
  using std::abs;
  if (n < 1) throw InvalidArgument("Gauss rule needs n >= 1");
  if (!(alpha > -1.0) || !(beta > -1.0))
    throw InvalidArgument("Gauss-Jacobi rule needs alpha, beta > -1");

  const int bits = effective_bits<Real>();
  const Real step_tol = pow2<Real>(-bits + 4);
  const JacobiRecurrence<Real> rec(n, alpha, beta);
  const std::vector<double> guess = initial_nodes(n, alpha, beta);
  const bool symmetric = alpha == beta;

  QuadRule<Real> rule;
  rule.kind = kind;
  rule.alpha = alpha;
  rule.beta = beta;
  rule.nodes.resize(n);
  rule.weights.resize(n);

  constexpr int kMaxNewton = 100;
  const int solve_count = symmetric ? (n + 1) / 2 : n;
  for (int i = 0; i < solve_count; ++i) {
    if (symmetric && n % 2 == 1 && i == n / 2) {
      rule.nodes[i] = Real(0);
      continue;
    }
    Real x(guess[i]);
    int it = 0;
    bool converged = false;
    for (; it < kMaxNewton; ++it) {
      Real pn, dpn;
      rec.eval(n, x, pn, dpn);
      const Real dx = pn / dpn;
      x -= dx;
      if (abs(dx) <= step_tol) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      std::ostringstream os;
      os << "Gauss rule Newton iteration did not converge (n=" << n << ", bits=" << bits
         << ", node " << i << ")";
      throw ConvergenceError(os.str(), it, 0.0);
    }
    rule.nodes[i] = x;
  }
  if (symmetric)
    for (int i = 0; i < n / 2; ++i) rule.nodes[n - 1 - i] = -rule.nodes[i];

  for (int i = 0; i < n; ++i) rule.weights[i] = 1 / rec.christoffel_sum(n, rule.nodes[i]);
  if (symmetric)
    for (int i = 0; i < n / 2; ++i) rule.weights[n - 1 - i] = rule.weights[i];
  return rule;
}

using RuleKey = std::tuple<int, double, double, int>;

template <class Real>
struct RuleCache {
  std::shared_mutex mutex;
  std::map<RuleKey, std::shared_ptr<const QuadRule<Real>>> rules;
};

template <class Real>
RuleCache<Real>& rule_cache() {
  static RuleCache<Real> cache;
  return cache;
}

template <class Real>
std::shared_ptr<const QuadRule<Real>> cached_rule(int n, double alpha, double beta, RuleKind kind) {
  auto& cache = rule_cache<Real>();
  const RuleKey key{n, alpha, beta, effective_bits<Real>()};
  {
    std::shared_lock lock(cache.mutex);
    auto it = cache.rules.find(key);
    if (it != cache.rules.end()) return it->second;
  }
  auto rule = std::make_shared<const QuadRule<Real>>(build_rule<Real>(n, alpha, beta, kind));
  std::unique_lock lock(cache.mutex);
  auto [it, inserted] = cache.rules.emplace(key, std::move(rule));
  return it->second;
}

template <class Real>
struct Panel {
  Real lo, hi;
  std::vector<Complex<Real>> value;
  double error = 0.0;
};

template <class Real>
void integrate_panel(const VectorIntegrand<Real>& f, int dim, Panel<Real>& p,
                     const QuadRule<Real>& low, const QuadRule<Real>& high,
                     std::vector<Complex<Real>>& scratch) {
  using std::abs;
  const Real mid = (p.lo + p.hi) / 2;
  const Real half = (p.hi - p.lo) / 2;
  std::vector<Complex<Real>> ql(dim, Complex<Real>(0)), qh(dim, Complex<Real>(0));
  auto accumulate = [&](const QuadRule<Real>& rule, std::vector<Complex<Real>>& acc) {
    for (int i = 0; i < rule.count(); ++i) {
      const Real t = mid + half * rule.nodes[i];
      f(t, scratch);
      const Real w = half * rule.weights[i];
      for (int k = 0; k < dim; ++k) acc[k] += w * scratch[k];
    }
  };
  accumulate(low, ql);
  accumulate(high, qh);
  double err = 0.0;
  for (int k = 0; k < dim; ++k) err = std::max(err, to_double(abs(qh[k] - ql[k])));
  p.value = std::move(qh);
  p.error = err;
}

}  // namespace

template <class Real>
QuadRule<Real> gauss_legendre(int n) {
  return build_rule<Real>(n, 0.0, 0.0, RuleKind::legendre);
}

template <class Real>
QuadRule<Real> gauss_jacobi(int n, double alpha, double beta) {
  return build_rule<Real>(n, alpha, beta, RuleKind::jacobi);
}

template <class Real>
std::shared_ptr<const QuadRule<Real>> cached_gauss_legendre(int n) {
  return cached_rule<Real>(n, 0.0, 0.0, RuleKind::legendre);
}

template <class Real>
std::shared_ptr<const QuadRule<Real>> cached_gauss_jacobi(int n, double alpha, double beta) {
  return cached_rule<Real>(n, alpha, beta, RuleKind::jacobi);
}

namespace {

template <class Real>
std::vector<Real> initial_breaks(const Real& lo, const Real& hi, const AdaptiveOptions& opts) {
  std::vector<Real> breaks{lo};
  if (opts.graded_left) {
    const Real len = hi - lo;
    for (int k = 40; k >= 1; --k) breaks.push_back(lo + len * pow2<Real>(-k));
  }
  for (double b : opts.breakpoints) {
    const Real rb(b);
    if (rb > lo && rb < hi) breaks.push_back(rb);
  }
  breaks.push_back(hi);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  return breaks;
}

}  // namespace

int adaptive_panel_order(int bits) { return std::max(24, 8 * ((bits / 4 + 7) / 8)); }

template <class Real>
AdaptiveResult<Real> integrate_adaptive(const VectorIntegrand<Real>& f, int dim, const Real& lo,
                                        const Real& hi, const AdaptiveOptions& opts) {
  using std::abs;
  const int rule_order = adaptive_panel_order(effective_bits<Real>());
  const auto low = cached_gauss_legendre<Real>(rule_order);
  const auto high = cached_gauss_legendre<Real>(2 * rule_order);
  std::vector<Complex<Real>> scratch(dim);

  std::vector<Panel<Real>> panels;
  const auto breaks = initial_breaks(lo, hi, opts);
  panels.reserve(breaks.size() * 4);
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    Panel<Real> p{breaks[i], breaks[i + 1], {}, 0.0};
    integrate_panel(f, dim, p, *low, *high, scratch);
    panels.push_back(std::move(p));
  }

  auto cmp = [&](int a, int b) { return panels[a].error < panels[b].error; };
  std::priority_queue<int, std::vector<int>, decltype(cmp)> heap(cmp);
  double total_error = 0.0;
  for (int i = 0; i < static_cast<int>(panels.size()); ++i) {
    heap.push(i);
    total_error += panels[i].error;
  }

  auto magnitude = [&]() {
    double m = 0.0;
    for (int k = 0; k < dim; ++k) {
      Complex<Real> s(0);
      for (const auto& p : panels) s += p.value[k];
      m = std::max(m, to_double(abs(s)));
    }
    return m;
  };

  // Roundoff floor: the 24/48 difference cannot drop below the rounding
  // error of the panel sums themselves.
  const double unit = std::ldexp(1.0, -effective_bits<Real>());
  auto panel_mass = [&]() {
    double m = 0.0;
    for (const auto& p : panels) {
      double pm = 0.0;
      for (int k = 0; k < dim; ++k) pm = std::max(pm, to_double(abs(p.value[k])));
      m += pm;
    }
    return m;
  };

  auto target = [&]() {
    double t = std::max(opts.abs_tol, 32.0 * unit * panel_mass());
    if (opts.rel_tol > 0.0) t = std::max(t, opts.rel_tol * magnitude());
    if (opts.sqrt_tol > 0.0) t = std::max(t, opts.sqrt_tol * std::sqrt(magnitude()));
    return t;
  };

  double goal = target();
  int rechecks = 0;
  auto done = [&]() {
    if (total_error > goal) return false;
    // Confirm with an exact resum: the running sum drifts once panel
    // errors span many orders of magnitude.
    total_error = 0.0;
    for (const auto& p : panels) total_error += p.error;
    goal = target();
    return total_error <= goal;
  };
  while (!done()) {
    if (static_cast<int>(panels.size()) >= opts.max_panels) {
      std::ostringstream os;
      os << "adaptive quadrature exhausted " << opts.max_panels
         << " panels: error estimate " << total_error << " > tolerance " << goal;
      throw AccuracyFailure(os.str(), total_error, goal);
    }
    const int worst = heap.top();
    heap.pop();
    const Real mid = (panels[worst].lo + panels[worst].hi) / 2;
    Panel<Real> right{mid, panels[worst].hi, {}, 0.0};
    total_error -= panels[worst].error;
    panels[worst].hi = mid;
    integrate_panel(f, dim, panels[worst], *low, *high, scratch);
    integrate_panel(f, dim, right, *low, *high, scratch);
    total_error += panels[worst].error + right.error;
    panels.push_back(std::move(right));
    heap.push(worst);
    heap.push(static_cast<int>(panels.size()) - 1);
    if (++rechecks % 16 == 0 ||
        panels[heap.top()].error * static_cast<double>(panels.size()) < total_error) {
      total_error = 0.0;
      for (const auto& p : panels) total_error += p.error;
      goal = target();
    }
  }

  AdaptiveResult<Real> result;
  result.values.assign(dim, Complex<Real>(0));
  // Sum left to right for reproducibility.
  std::vector<int> order(panels.size());
  for (int i = 0; i < static_cast<int>(order.size()); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) { return panels[a].lo < panels[b].lo; });
  double err = 0.0;
  for (int i : order) {
    for (int k = 0; k < dim; ++k) result.values[k] += panels[i].value[k];
    err += panels[i].error;
  }
  result.error_estimate = err;
  result.panels = static_cast<int>(panels.size());
  return result;
}

template <class Real>
Real integrate_real(const std::function<Real(const Real&)>& f, const Real& lo, const Real& hi,
                    const AdaptiveOptions& opts) {
  VectorIntegrand<Real> vf = [&](const Real& t, std::span<Complex<Real>> out) {
    out[0] = Complex<Real>(f(t), Real(0));
  };
  return integrate_adaptive<Real>(vf, 1, lo, hi, opts).values[0].real();
}

template <class Real>
Complex<Real> integrate_against(const Evaluator<Real>& f, const Evaluator<Real>& phi,
                                const Interval& omega, double tol, const AdaptiveOptions& base) {
  if (!(tol > 0.0)) throw InvalidArgument("integrate_against: tolerance must be positive");
  AdaptiveOptions opts = base;
  opts.abs_tol = tol;
  VectorIntegrand<Real> vf = [&](const Real& t, std::span<Complex<Real>> out) {
    out[0] = f(t) * std::conj(phi(t));
  };
  return integrate_adaptive<Real>(vf, 1, Real(omega.lo), Real(omega.hi), opts).values[0];
}

template <class Real>
Real l2_norm(const Evaluator<Real>& g, const Interval& omega, double tol,
             const AdaptiveOptions& base) {
  using std::sqrt;
  if (!(tol > 0.0)) throw InvalidArgument("l2_norm: tolerance must be positive");
  AdaptiveOptions opts = base;
  opts.abs_tol = tol * tol;
  opts.sqrt_tol = tol;
  std::function<Real(const Real&)> sq = [&](const Real& t) { return std::norm(g(t)); };
  Real s = integrate_real<Real>(sq, Real(omega.lo), Real(omega.hi), opts);
  if (s < 0) s = 0;
  return sqrt(s);
}

template <class Real>
CompositeGrid<Real> composite_grid(const Interval& omega, int panels, int order, bool graded_left) {
  if (panels < 1 || order < 1) throw InvalidArgument("composite_grid: panels and order must be >= 1");
  std::vector<Real> breaks{Real(omega.lo), Real(omega.hi)};
  if (graded_left) {
    AdaptiveOptions o;
    o.graded_left = true;
    breaks = initial_breaks(Real(omega.lo), Real(omega.hi), o);
  }
  while (static_cast<int>(breaks.size()) - 1 < panels) {
    int widest = 0;
    Real w = breaks[1] - breaks[0];
    for (int i = 1; i + 1 < static_cast<int>(breaks.size()); ++i)
      if (breaks[i + 1] - breaks[i] > w) {
        w = breaks[i + 1] - breaks[i];
        widest = i;
      }
    breaks.insert(breaks.begin() + widest + 1, (breaks[widest] + breaks[widest + 1]) / 2);
  }
  const auto rule = cached_gauss_legendre<Real>(order);
  CompositeGrid<Real> grid;
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const Real mid = (breaks[p] + breaks[p + 1]) / 2;
    const Real half = (breaks[p + 1] - breaks[p]) / 2;
    for (int i = 0; i < rule->count(); ++i) {
      grid.nodes.push_back(mid + half * rule->nodes[i]);
      grid.weights.push_back(half * rule->weights[i]);
    }
  }
  return grid;
}

#define FRAMEWARD_INSTANTIATE(Real)                                                            \
  template QuadRule<Real> gauss_legendre<Real>(int);                                          \
  template QuadRule<Real> gauss_jacobi<Real>(int, double, double);                            \
  template std::shared_ptr<const QuadRule<Real>> cached_gauss_legendre<Real>(int);            \
  template std::shared_ptr<const QuadRule<Real>> cached_gauss_jacobi<Real>(int, double, double); \
  template AdaptiveResult<Real> integrate_adaptive<Real>(const VectorIntegrand<Real>&, int,    \
                                                         const Real&, const Real&,             \
                                                         const AdaptiveOptions&);              \
  template Real integrate_real<Real>(const std::function<Real(const Real&)>&, const Real&,    \
                                     const Real&, const AdaptiveOptions&);                     \
  template Complex<Real> integrate_against<Real>(const Evaluator<Real>&, const Evaluator<Real>&, \
                                                 const Interval&, double,                      \
                                                 const AdaptiveOptions&);                      \
  template Real l2_norm<Real>(const Evaluator<Real>&, const Interval&, double,                 \
                              const AdaptiveOptions&);                                         \
  template CompositeGrid<Real> composite_grid<Real>(const Interval&, int, int, bool);

FRAMEWARD_INSTANTIATE(double)
FRAMEWARD_INSTANTIATE(long double)
FRAMEWARD_INSTANTIATE(mpreal)

#undef FRAMEWARD_INSTANTIATE

}  // namespace frameward
