#include "frameward/experiments.hpp"

#include "frameward/errors.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <system_error>
#include <thread>

namespace frameward {

void SweepRecord::set_bounds(const FrameBounds& fb) {
  A_N = fb.A;
  B_N = fb.B;
  kappa = fb.B / fb.A;
}

int PrecisionPolicy::bits_for(const FrameSpec& spec, long N) const {
  return is_auto() ? required_bits(spec, N) : bits;
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

SweepRecord base_record(const FrameSpec& spec, long N) {
  SweepRecord r;
  r.family = spec.token();
  r.params = spec.params();
  r.N = N;
  return r;
}

void report(const SweepOptions& opts, long N, Clock::time_point start) {
  if (!opts.progress) return;
  opts.progress("# N=" + std::to_string(N) + " done (" +
                std::to_string(static_cast<long long>(std::llround(elapsed_ms(start)))) + " ms)");
}

void stamp(SweepRecord& r, const SweepOptions& opts, Clock::time_point start) {
  if (opts.record_timing) r.wall_time_ms = elapsed_ms(start);
}

/// Runs task(i) for i < count on up to `threads` workers.  Exceptions are
/// rethrown in index order after all workers finish.
template <class Task>
void parallel_for(std::size_t count, int threads, Task task) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < count;) {
        try {
          task(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

template <class Real>
std::vector<double> spectrum_values(const FrameSpec& spec, long N) {
  JacobiOptions jo;
  jo.vectors = false;
  const auto fact = hermitian_eig<Real>(assemble_square<Real>(spec, N).matrix, jo);
  std::vector<double> out(static_cast<std::size_t>(fact.values.size()));
  for (long i = 0; i < fact.values.size(); ++i) out[i] = to_double(fact.values(i));
  return out;
}

template <class Real>
FrameBounds bounds_only(const FrameSpec& spec, long N) {
  JacobiOptions jo;
  jo.vectors = false;
  return frame_bounds(hermitian_eig<Real>(assemble_square<Real>(spec, N).matrix, jo));
}

/// One N-column of the coefficient table; out holds one record per target.
template <class Real>
void table_column(const FrameSpec& spec, long N, const std::vector<TargetFunction>& targets,
                  int bits, std::vector<SweepRecord>& out) {
  const auto sys = assemble_square<Real>(spec, N);
  const int need = required_bits(spec, N);
  if (sys.precision_bits < need) {
    for (auto& r : out)
      r.note = "exact projection needs " + std::to_string(need) + " bits, have " +
               std::to_string(sys.precision_bits);
    return;
  }
  const auto fact = hermitian_eig<Real>(sys.matrix);
  const auto fb = frame_bounds(fact);
  const double rhs_tol = exact_rhs_tolerance(spec, N);
  for (std::size_t k = 0; k < targets.size(); ++k) {
    const auto bound = bind_target(sys, targets[k], rhs_tol);
    out[k].set_bounds(fb);
    out[k].coeff_norm = to_double(solve_exact(bound, fact).norm());
    out[k].precision_bits = bits;
  }
}

template <class Real>
SweepRecord exact_record(const FrameSpec& spec, long N, const TargetFunction& f, int bits,
                         const SweepOptions& opts) {
  auto r = base_record(spec, N);
  r.f_id = f.id;
  r.M = N;
  r.eps = 0.0;
  r.method = to_string(Method::exact);
  r.precision_bits = bits;
  try {
    auto sys = assemble_square<Real>(spec, N);
    const int need = required_bits(spec, N);
    if (sys.precision_bits < need)
      throw PrecisionRefusal("exact projection for " + spec.token() + " N=" + std::to_string(N) +
                                 " needs " + std::to_string(need) + " bits",
                             need);
    sys = bind_target(std::move(sys), f, exact_rhs_tolerance(spec, N));
    const auto fact = hermitian_eig<Real>(sys.matrix);
    const auto a = project_exact(sys, fact);
    r.set_bounds(frame_bounds(fact));
    r.coeff_norm = to_double(a.coefficient_norm());
    r.rank_kept = N;
    r.l2_error = error_l2(f, a, is_multiprecision_v<Real> ? opts.exact_error_tol : opts.error_tol);
  } catch (const PrecisionRefusal& e) {
    r.note = e.what();
  }
  return r;
}

void fill_approximant(SweepRecord& r, const TargetFunction& f, const FrameApproximant<double>& a,
                      const SweepOptions& opts) {
  r.coeff_norm = a.coefficient_norm();
  r.l2_error = error_l2(f, a, opts.error_tol);
  if (a.rank_kept) r.rank_kept = *a.rank_kept;
  r.precision_bits = kDoubleBits;
}

}  // namespace

std::vector<double> spectrum_experiment(const FrameSpec& spec, long N, int bits) {
  require_admissible(spec, N);
  if (bits <= kDoubleBits) return spectrum_values<double>(spec, N);
  WorkingPrecision wp(bits);
  return spectrum_values<mpreal>(spec, N);
}

ConditionSweep condition_sweep(const FrameSpec& spec, const std::vector<long>& N_list,
                               PrecisionPolicy policy, const SweepOptions& opts) {
  for (std::size_t i = 0; i < N_list.size(); ++i) {
    require_admissible(spec, N_list[i]);
    if (i > 0 && N_list[i] <= N_list[i - 1])
      throw InvalidArgument("condition_sweep: N list must be ascending");
  }
  ConditionSweep out;
  switch (spec.family()) {
    case Family::FourierExtension: out.bound_label = "E(T)^N"; break;
    case Family::AugmentedFourier: out.bound_label = "N^(2K-1)"; break;
    case Family::WeightedLegendre: out.bound_label = "4^N"; break;
    case Family::AugmentedOrthonormal: out.bound_label = "(1+r)/(1-r)"; break;
  }
  for (long N : N_list) {
    const auto start = Clock::now();
    const int bits = policy.bits_for(spec, N);
    auto r = base_record(spec, N);
    r.precision_bits = bits;
    if (bits <= kDoubleBits) {
      r.set_bounds(bounds_only<double>(spec, N));
    } else {
      WorkingPrecision wp(bits);
      r.set_bounds(bounds_only<mpreal>(spec, N));
    }
    stamp(r, opts, start);
    out.records.push_back(std::move(r));
    out.bound.push_back(std::exp2(forecast_log2_kappa(spec, N)));
    report(opts, N, start);
  }
  return out;
}

std::vector<SweepRecord> coefficient_table(const FrameSpec& spec,
                                           const std::vector<std::string>& f_ids,
                                           const std::vector<long>& N_list,
                                           PrecisionPolicy policy, const SweepOptions& opts) {
  std::vector<TargetFunction> targets;
  for (const auto& id : f_ids) {
    targets.push_back(make_target(id));
    require_compatible(spec, targets.back());
  }
  for (long N : N_list) require_admissible(spec, N);

  std::vector<SweepRecord> out(f_ids.size() * N_list.size());
  for (std::size_t j = 0; j < N_list.size(); ++j) {
    const long N = N_list[j];
    const auto start = Clock::now();
    const int bits = policy.bits_for(spec, N);
    std::vector<SweepRecord> column;
    for (const auto& f : targets) {
      auto r = base_record(spec, N);
      r.f_id = f.id;
      r.M = N;
      r.eps = 0.0;
      r.method = to_string(Method::exact);
      column.push_back(std::move(r));
    }
    if (bits <= kDoubleBits) {
      table_column<double>(spec, N, targets, bits, column);
    } else {
      WorkingPrecision wp(bits);
      table_column<mpreal>(spec, N, targets, bits, column);
    }
    for (std::size_t k = 0; k < targets.size(); ++k) {
      stamp(column[k], opts, start);
      out[k * N_list.size() + j] = std::move(column[k]);
    }
    report(opts, N, start);
  }
  return out;
}

std::vector<SweepRecord> error_sweep(const FrameSpec& spec, const std::string& f_id,
                                     const std::vector<long>& N_list,
                                     const std::vector<double>& eps_list,
                                     const std::vector<Method>& methods, PrecisionPolicy policy,
                                     const SweepOptions& opts) {
  const auto f = make_target(f_id);
  require_compatible(spec, f);
  for (long N : N_list) require_admissible(spec, N);
  for (Method m : methods)
    if (m != Method::exact && m != Method::tsvd && m != Method::dual)
      throw InvalidArgument("error_sweep: method " + to_string(m) + " not supported");
  for (double e : eps_list)
    if (!(e > 0.0)) throw InvalidArgument("error_sweep: eps must be positive");

  // slots[j][m] holds the records of N_list[j] and methods[m].
  std::vector<std::vector<std::vector<SweepRecord>>> slots(
      N_list.size(), std::vector<std::vector<SweepRecord>>(methods.size()));

  for (std::size_t j = 0; j < N_list.size(); ++j)
    for (std::size_t m = 0; m < methods.size(); ++m) {
      if (methods[m] != Method::exact) continue;
      const long N = N_list[j];
      const auto start = Clock::now();
      const int bits = policy.bits_for(spec, N);
      SweepRecord r;
      if (bits <= kDoubleBits) {
        r = exact_record<double>(spec, N, f, bits, opts);
      } else {
        WorkingPrecision wp(bits);
        r = exact_record<mpreal>(spec, N, f, bits, opts);
      }
      stamp(r, opts, start);
      slots[j][m].push_back(std::move(r));
      report(opts, N, start);
    }

  parallel_for(N_list.size(), opts.threads, [&](std::size_t j) {
    const long N = N_list[j];
    std::optional<GramSystem<double>> sys;
    std::optional<SpectralFactorization<double>> fact;
    for (std::size_t m = 0; m < methods.size(); ++m) {
      if (methods[m] == Method::tsvd) {
        if (!sys) {
          sys = bind_target(assemble_square<double>(spec, N), f, opts.rhs_tol);
          fact = hermitian_eig<double>(sys->matrix);
        }
        for (double eps : eps_list) {
          const auto start = Clock::now();
          auto r = base_record(spec, N);
          r.f_id = f.id;
          r.M = N;
          r.eps = eps;
          r.method = to_string(Method::tsvd);
          fill_approximant(r, f, project_tsvd(*sys, *fact, eps), opts);
          stamp(r, opts, start);
          slots[j][m].push_back(std::move(r));
        }
      } else if (methods[m] == Method::dual) {
        const auto start = Clock::now();
        auto r = base_record(spec, N);
        r.f_id = f.id;
        r.M = N;
        r.method = to_string(Method::dual);
        fill_approximant(r, f, project_dual(spec, N, f), opts);
        stamp(r, opts, start);
        slots[j][m].push_back(std::move(r));
      }
    }
  });

  std::vector<SweepRecord> out;
  for (auto& row : slots)
    for (auto& cell : row)
      for (auto& r : cell) out.push_back(std::move(r));
  return out;
}

long oversampled_rows(const FrameSpec& spec, double gamma, long N) {
  if (!(gamma >= 1.0)) throw InvalidArgument("oversampling factor must be >= 1");
  const long M = std::lround(gamma * static_cast<double>(N));
  if (!is_admissible(spec, M))
    throw InvalidArgument("M = round(" + format_real(gamma) + " * " + std::to_string(N) + ") = " +
                          std::to_string(M) + " is not admissible: " + admissibility_rule(spec));
  return M;
}

std::vector<SweepRecord> oversample_sweep(const FrameSpec& spec, const std::string& f_id,
                                          const std::vector<double>& gammas,
                                          const std::vector<long>& N_list, double eps,
                                          const SweepOptions& opts) {
  const auto f = make_target(f_id);
  require_compatible(spec, f);
  if (!(eps > 0.0)) throw InvalidArgument("oversample_sweep: eps must be positive");
  std::vector<std::pair<long, long>> cells;  // (M, N), gamma-major
  for (double g : gammas)
    for (long N : N_list) {
      require_admissible(spec, N);
      cells.emplace_back(oversampled_rows(spec, g, N), N);
    }

  std::vector<SweepRecord> out(cells.size());
  parallel_for(cells.size(), opts.threads, [&](std::size_t i) {
    const auto [M, N] = cells[i];
    const auto start = Clock::now();
    auto r = base_record(spec, N);
    r.f_id = f.id;
    r.M = M;
    r.eps = eps;
    r.method = to_string(Method::oversampled);
    if (M == N) {
      // Same path as the square tsvd records.
      const auto sys = bind_target(assemble_square<double>(spec, N), f, opts.rhs_tol);
      fill_approximant(r, f, project_tsvd(sys, hermitian_eig<double>(sys.matrix), eps), opts);
    } else {
      fill_approximant(r, f, project_oversampled<double>(spec, M, N, f, eps, opts.rhs_tol), opts);
    }
    stamp(r, opts, start);
    out[i] = std::move(r);
    report(opts, N, start);
  });
  return out;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("fit_slope: need >= 2 points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

double asymptotic_slope(const std::vector<double>& x, const std::vector<double>& y,
                        std::size_t window) {
  if (x.size() != y.size()) throw InvalidArgument("asymptotic_slope: size mismatch");
  const std::size_t k = std::min(window, x.size());
  return fit_slope(std::vector<double>(x.end() - k, x.end()), std::vector<double>(y.end() - k, y.end()));
}

std::string format_real(std::optional<double> v) {
  if (!v || std::isnan(*v)) return "NA";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, *v);
  return std::string(buf, res.ptr);
}

namespace {

template <class T>
std::string field(const std::optional<T>& v) {
  if (!v) return "NA";
  if constexpr (std::is_same_v<T, std::string>)
    return *v;
  else if constexpr (std::is_floating_point_v<T>)
    return format_real(*v);
  else
    return std::to_string(*v);
}

std::string column(const SweepRecord& r, const std::string& name) {
  static const std::map<std::string, std::function<std::string(const SweepRecord&)>> getters = {
      {"family", [](const SweepRecord& r) { return r.family; }},
      {"params", [](const SweepRecord& r) { return r.params; }},
      {"f_id", [](const SweepRecord& r) { return field(r.f_id); }},
      {"N", [](const SweepRecord& r) { return std::to_string(r.N); }},
      {"M", [](const SweepRecord& r) { return field(r.M); }},
      {"eps", [](const SweepRecord& r) { return field(r.eps); }},
      {"method", [](const SweepRecord& r) { return field(r.method); }},
      {"l2_error", [](const SweepRecord& r) { return field(r.l2_error); }},
      {"coeff_norm", [](const SweepRecord& r) { return field(r.coeff_norm); }},
      {"A_N", [](const SweepRecord& r) { return field(r.A_N); }},
      {"B_N", [](const SweepRecord& r) { return field(r.B_N); }},
      {"kappa", [](const SweepRecord& r) { return field(r.kappa); }},
      {"rank_kept", [](const SweepRecord& r) { return field(r.rank_kept); }},
      {"precision_bits", [](const SweepRecord& r) { return field(r.precision_bits); }},
      {"wall_time_ms", [](const SweepRecord& r) { return field(r.wall_time_ms); }},
  };
  const auto it = getters.find(name);
  if (it == getters.end()) throw InvalidArgument("unknown record column '" + name + "'");
  return it->second(r);
}

std::vector<std::string> csv_columns() {
  std::vector<std::string> cols;
  std::string header = kCsvHeader;
  std::size_t pos = 0;
  while (pos <= header.size()) {
    const auto comma = header.find(',', pos);
    cols.push_back(header.substr(pos, comma - pos));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return cols;
}

}  // namespace

void write_csv(const std::vector<SweepRecord>& records, std::ostream& os) {
  static const auto cols = csv_columns();
  os << kCsvHeader << '\n';
  for (const auto& r : records) {
    for (std::size_t c = 0; c < cols.size(); ++c) os << (c ? "," : "") << column(r, cols[c]);
    os << '\n';
  }
}

void write_csv(const std::vector<SweepRecord>& records, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::system_error(errno, std::generic_category(), "cannot open " + path);
  write_csv(records, os);
  os.flush();
  if (!os) throw std::system_error(errno, std::generic_category(), "cannot write " + path);
}

void write_plot_data(const std::vector<SweepRecord>& records,
                     const std::vector<std::string>& columns, std::ostream& os) {
  for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? " " : "") << columns[c];
  os << '\n';
  for (const auto& r : records) {
    for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? " " : "") << column(r, columns[c]);
    os << '\n';
  }
}

void write_plot_table(const std::vector<std::string>& columns,
                      const std::vector<std::vector<double>>& rows, std::ostream& os) {
  for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? " " : "") << columns[c];
  os << '\n';
  for (const auto& row : rows) {
    if (row.size() != columns.size()) throw InvalidArgument("write_plot_table: ragged row");
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? " " : "") << format_real(row[c]);
    os << '\n';
  }
}

}  // namespace frameward
