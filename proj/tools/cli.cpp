#include "cli.hpp"

#include "frameward/acceptance.hpp"
#include "frameward/errors.hpp"
#include "frameward/experiments.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <system_error>

namespace frameward::cli {

namespace {

struct RunConfig {
  std::string command;
  std::string frame = "fe";
  double T = 2.0;
  int K = 4;
  double alpha = 0.5;
  int p = 2;
  std::string f;
  std::string N;
  std::string M;
  std::string gamma;
  std::string eps;
  std::string methods;
  std::string method = "tsvd";
  std::string precision = "auto";
  std::string out;
  std::string plot;
  std::string emit_coeffs;
  std::string criteria;
  int threads = 1;
  bool record_timing = false;
  bool quiet = false;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, sep);)
    if (!item.empty()) parts.push_back(item);
  return parts;
}

long to_long(const std::string& s, const std::string& what) {
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || s.empty()) throw InvalidArgument("bad integer '" + s + "' in " + what);
  return v;
}

double to_real(const std::string& s, const std::string& what) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || s.empty()) throw InvalidArgument("bad number '" + s + "' in " + what);
  return v;
}

/// "10,20,40" and ranges "lo:hi:step" (step defaults to 1).
std::vector<long> parse_longs(const std::string& s, const std::string& what) {
  std::vector<long> out;
  for (const auto& item : split(s, ',')) {
    const auto r = split(item, ':');
    if (item.find(':') == std::string::npos) {
      out.push_back(to_long(item, what));
    } else if (r.size() == 2 || r.size() == 3) {
      const long lo = to_long(r[0], what), hi = to_long(r[1], what);
      const long step = r.size() == 3 ? to_long(r[2], what) : 1;
      if (step <= 0) throw InvalidArgument("range step must be positive in " + what);
      for (long n = lo; n <= hi; n += step) out.push_back(n);
    } else {
      throw InvalidArgument("bad range '" + item + "' in " + what);
    }
  }
  if (out.empty()) throw InvalidArgument(what + " is empty");
  return out;
}

std::vector<double> parse_reals(const std::string& s, const std::string& what) {
  std::vector<double> out;
  for (const auto& item : split(s, ',')) out.push_back(to_real(item, what));
  if (out.empty()) throw InvalidArgument(what + " is empty");
  return out;
}

FrameSpec make_spec(const RunConfig& c) {
  if (c.frame == "fe") return FrameSpec::fourier_extension(c.T);
  if (c.frame == "augf") return FrameSpec::augmented_fourier(c.K);
  if (c.frame == "wleg") return FrameSpec::weighted_legendre(c.alpha);
  if (c.frame == "augortho") return FrameSpec::augmented_orthonormal(PowerLaw{c.p});
  throw InvalidArgument("unknown frame '" + c.frame + "' (fe, augf, wleg, augortho)");
}

std::string default_target(const FrameSpec& spec) {
  switch (spec.family()) {
    case Family::FourierExtension: return "runge25";
    case Family::AugmentedFourier: return "pole";
    case Family::WeightedLegendre: return "mixed";
    case Family::AugmentedOrthonormal: return "synthetic-p51";
  }
  return "exp";
}

PrecisionPolicy parse_precision(const std::string& s) {
  if (s == "auto") return PrecisionPolicy::automatic();
  const long bits = to_long(s, "--precision");
  if (bits < kDoubleBits) throw InvalidArgument("--precision must be 'auto' or at least 53 bits");
  return PrecisionPolicy::fixed(static_cast<int>(bits));
}

Method parse_method(const std::string& s) {
  for (Method m : {Method::exact, Method::tsvd, Method::oversampled, Method::dual})
    if (to_string(m) == s) return m;
  throw InvalidArgument("unknown method '" + s + "' (exact, tsvd, oversampled, dual)");
}

std::vector<long> admissible_list(const FrameSpec& spec, const std::string& s) {
  auto Ns = parse_longs(s, "--N");
  for (long N : Ns) require_admissible(spec, N);
  return Ns;
}

/// Runs body with a stream bound to --out (or the default stream).
void with_output(const std::string& path, std::ostream& fallback,
                 const std::function<void(std::ostream&)>& body) {
  if (path.empty() || path == "-") {
    body(fallback);
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::system_error(errno, std::generic_category(), "cannot open " + path);
  body(os);
  os.flush();
  if (!os) throw std::system_error(errno, std::generic_category(), "cannot write " + path);
}

SweepOptions sweep_options(const RunConfig& c, std::ostream& err) {
  SweepOptions o;
  o.threads = c.threads;
  o.record_timing = c.record_timing;
  if (!c.quiet) o.progress = [&err](const std::string& line) { err << line << '\n' << std::flush; };
  return o;
}

void report_refusals(const std::vector<SweepRecord>& recs, std::ostream& err) {
  for (const auto& r : recs)
    if (!r.note.empty()) err << "# refused N=" << r.N << ": " << r.note << '\n';
}

// ---------------------------------------------------------------------------

int gram_spectrum(const RunConfig& c, std::ostream& out) {
  const auto spec = make_spec(c);
  const auto Ns = admissible_list(spec, c.N.empty() ? "50" : c.N);
  if (Ns.size() != 1) throw InvalidArgument("gram-spectrum takes a single N");
  const auto policy = parse_precision(c.precision);
  const auto s = spectrum_experiment(spec, Ns[0], policy.bits_for(spec, Ns[0]));
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < s.size(); ++i) rows.push_back({double(i + 1), s[i]});
  with_output(c.out, out, [&](std::ostream& os) {
    os << "n,sigma\n";
    for (const auto& r : rows) os << format_real(r[0]) << ',' << format_real(r[1]) << '\n';
  });
  if (!c.plot.empty()) with_output(c.plot, out, [&](std::ostream& os) { write_plot_table({"n", "sigma"}, rows, os); });
  return kOk;
}

int condition(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto spec = make_spec(c);
  const auto Ns = admissible_list(spec, c.N.empty() ? "2:40:2" : c.N);
  const auto sweep = condition_sweep(spec, Ns, parse_precision(c.precision), sweep_options(c, err));
  with_output(c.out, out, [&](std::ostream& os) { write_csv(sweep.records, os); });
  if (!c.plot.empty()) {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < sweep.records.size(); ++i) {
      const auto& r = sweep.records[i];
      rows.push_back({double(r.N), *r.A_N, *r.B_N, *r.kappa, sweep.bound[i]});
    }
    with_output(c.plot, out, [&](std::ostream& os) {
      write_plot_table({"N", "A_N", "B_N", "kappa", "bound"}, rows, os);
    });
  }
  return kOk;
}

int table1(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto spec = make_spec(c);
  const auto Ns = admissible_list(spec, c.N.empty() ? "10,20,40,80,160" : c.N);
  const auto fs = split(c.f.empty() ? "exp,runge16,abs5" : c.f, ',');
  for (const auto& id : fs) require_compatible(spec, make_target(id));
  const auto recs = coefficient_table(spec, fs, Ns, parse_precision(c.precision), sweep_options(c, err));
  report_refusals(recs, err);
  with_output(c.out, out, [&](std::ostream& os) { write_csv(recs, os); });
  if (!c.plot.empty())
    with_output(c.plot, out, [&](std::ostream& os) {
      write_plot_data(recs, {"f_id", "N", "coeff_norm", "kappa", "precision_bits"}, os);
    });
  return kOk;
}

int error_sweep_cmd(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto spec = make_spec(c);
  const auto Ns = admissible_list(spec, c.N.empty() ? "10:100:10" : c.N);
  const auto f = c.f.empty() ? default_target(spec) : c.f;
  require_compatible(spec, make_target(f));
  std::vector<Method> methods;
  for (const auto& m : split(c.methods.empty() ? "tsvd" : c.methods, ',')) methods.push_back(parse_method(m));
  const auto eps = parse_reals(c.eps.empty() ? "1e-4,1e-8,1e-12" : c.eps, "--eps");
  const auto recs = error_sweep(spec, f, Ns, eps, methods, parse_precision(c.precision), sweep_options(c, err));
  report_refusals(recs, err);
  with_output(c.out, out, [&](std::ostream& os) { write_csv(recs, os); });
  if (!c.plot.empty())
    with_output(c.plot, out, [&](std::ostream& os) {
      write_plot_data(recs, {"N", "eps", "method", "l2_error", "coeff_norm", "rank_kept"}, os);
    });
  return kOk;
}

int oversample_cmd(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto spec = make_spec(c);
  const auto Ns = admissible_list(spec, c.N.empty() ? "10:100:10" : c.N);
  const auto f = c.f.empty() ? default_target(spec) : c.f;
  require_compatible(spec, make_target(f));
  const auto gammas = parse_reals(c.gamma.empty() ? "1,2,4" : c.gamma, "--gamma");
  const auto eps = parse_reals(c.eps.empty() ? "1e-12" : c.eps, "--eps");
  if (eps.size() != 1) throw InvalidArgument("oversample-sweep takes a single eps");
  for (double g : gammas)
    for (long N : Ns) oversampled_rows(spec, g, N);
  const auto recs = oversample_sweep(spec, f, gammas, Ns, eps[0], sweep_options(c, err));
  with_output(c.out, out, [&](std::ostream& os) { write_csv(recs, os); });
  if (!c.plot.empty())
    with_output(c.plot, out, [&](std::ostream& os) {
      write_plot_data(recs, {"N", "M", "l2_error", "coeff_norm", "rank_kept"}, os);
    });
  return kOk;
}

template <class Real>
void emit_coefficients(const FrameApproximant<Real>& a, std::ostream& os) {
  os << "index re im\n";
  for (long n = 0; n < a.N(); ++n) {
    const auto z = to_double(a.coefficients(n));
    os << to_string(a.indices[n]) << ' ' << format_real(z.real()) << ' ' << format_real(z.imag()) << '\n';
  }
}

template <class Real>
SweepRecord project_record(const FrameSpec& spec, const TargetFunction& f,
                           const FrameApproximant<Real>& a, double error_tol) {
  SweepRecord r;
  r.family = spec.token();
  r.params = spec.params();
  r.f_id = f.id;
  r.N = a.N();
  r.M = a.M;
  r.eps = a.eps;
  r.method = to_string(a.method);
  r.l2_error = error_l2(f, a, error_tol);
  r.coeff_norm = to_double(a.coefficient_norm());
  r.rank_kept = a.rank_kept;
  r.precision_bits = a.precision_bits;
  return r;
}

int project_cmd(const RunConfig& c, std::ostream& out) {
  const auto spec = make_spec(c);
  const auto Ns = admissible_list(spec, c.N.empty() ? "40" : c.N);
  if (Ns.size() != 1) throw InvalidArgument("project takes a single N");
  const long N = Ns[0];
  const auto f = make_target(c.f.empty() ? default_target(spec) : c.f);
  require_compatible(spec, f);
  const Method method = parse_method(c.method);
  const auto eps = parse_reals(c.eps.empty() ? "1e-8" : c.eps, "--eps");
  if (eps.size() != 1) throw InvalidArgument("project takes a single eps");
  long M = N;
  if (!c.M.empty()) {
    const auto Ms = parse_longs(c.M, "--M");
    if (Ms.size() != 1) throw InvalidArgument("project takes a single M");
    M = Ms[0];
    require_admissible(spec, M);
    if (M < N) throw InvalidArgument("--M must be at least N");
  } else if (!c.gamma.empty()) {
    const auto gs = parse_reals(c.gamma, "--gamma");
    if (gs.size() != 1) throw InvalidArgument("project takes a single gamma");
    M = oversampled_rows(spec, gs[0], N);
  }
  const bool to_stdout = c.emit_coeffs == "-";
  auto finish = [&](const auto& approx, double error_tol) {
    const auto rec = project_record(spec, f, approx, error_tol);
    if (!c.emit_coeffs.empty())
      with_output(to_stdout ? "" : c.emit_coeffs, out, [&](std::ostream& os) { emit_coefficients(approx, os); });
    if (!to_stdout || !c.out.empty())
      with_output(c.out, out, [&](std::ostream& os) { write_csv({rec}, os); });
  };
  switch (method) {
    case Method::exact: {
      const int bits = parse_precision(c.precision).bits_for(spec, N);
      WorkingPrecision wp(bits);
      finish(project_exact<mpreal>(spec, N, f), 1e-20);
      break;
    }
    case Method::tsvd: finish(project_tsvd<double>(spec, N, f, eps[0]), 1e-14); break;
    case Method::oversampled: finish(project_oversampled<double>(spec, M, N, f, eps[0]), 1e-14); break;
    case Method::dual: finish(project_dual(spec, N, f), 1e-14); break;
    case Method::synthesis: throw InvalidArgument("synthesis is not a projection method");
  }
  return kOk;
}

int selftest(const RunConfig& c, std::ostream& out) {
  std::vector<int> ids;
  if (!c.criteria.empty())
    for (long id : parse_longs(c.criteria, "--criteria")) ids.push_back(static_cast<int>(id));
  for (int id : ids)
    if (id < 1 || id > kAcceptanceCount) throw InvalidArgument("no criterion " + std::to_string(id));
  int failed = 0;
  run_acceptance(ids, [&](const CriterionResult& r) {
    out << format_result(r) << '\n' << std::flush;
    if (!r.passed) ++failed;
  });
  return failed == 0 ? kOk : kNumerical;
}

void add_common(CLI::App* sub, RunConfig& c) {
  auto env = [](CLI::Option* o, const std::string& name) { o->envname("FRAMEWARD_" + name); };
  env(sub->add_option("--frame", c.frame, "fe | augf | wleg | augortho")->capture_default_str(), "FRAME");
  env(sub->add_option("--T", c.T, "Fourier extension ratio")->capture_default_str(), "T");
  env(sub->add_option("--K", c.K, "augmented Fourier: number of Legendre polynomials")->capture_default_str(), "K");
  env(sub->add_option("--alpha", c.alpha, "weighted Legendre exponent")->capture_default_str(), "ALPHA");
  env(sub->add_option("--p", c.p, "augmented orthonormal power law")->capture_default_str(), "P");
  env(sub->add_option("--N", c.N, "N values: 10,20,40 or lo:hi:step"), "N");
  env(sub->add_option("--precision", c.precision, "bits, or auto for the precision rule")->capture_default_str(), "PRECISION");
  env(sub->add_option("--out", c.out, "output path (default stdout)"), "OUT");
  env(sub->add_option("--plot", c.plot, "plot-data path"), "PLOT");
  env(sub->add_option("--threads", c.threads, "workers for double-precision tasks")->capture_default_str(), "THREADS");
  env(sub->add_flag("--record-timing", c.record_timing, "fill wall_time_ms"), "RECORD_TIMING");
  env(sub->add_flag("--quiet", c.quiet, "no progress lines"), "QUIET");
}

void add_target(CLI::App* sub, RunConfig& c, const std::string& help) {
  sub->add_option("--f", c.f, help)->envname("FRAMEWARD_F");
}

}  // namespace

int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Frame approximation experiments"};
  app.name("frameward");
  app.require_subcommand(1);

  auto* spectrum = app.add_subcommand("gram-spectrum", "eigenvalues of G_N");
  add_common(spectrum, c);

  auto* cond = app.add_subcommand("condition-sweep", "truncated frame bounds and kappa(G_N) over N");
  add_common(cond, c);

  auto* t1 = app.add_subcommand("table1", "coefficient norms of exact projections");
  add_common(t1, c);
  add_target(t1, c, "comma-separated target ids");

  auto* es = app.add_subcommand("error-sweep", "L2 errors over N, eps and method");
  add_common(es, c);
  add_target(es, c, "target id");
  es->add_option("--eps", c.eps, "eps values")->envname("FRAMEWARD_EPS");
  es->add_option("--methods", c.methods, "subset of exact,tsvd,dual")->envname("FRAMEWARD_METHODS");

  auto* os = app.add_subcommand("oversample-sweep", "oversampled least squares over gamma and N");
  add_common(os, c);
  add_target(os, c, "target id");
  os->add_option("--gamma", c.gamma, "oversampling factors")->envname("FRAMEWARD_GAMMA");
  os->add_option("--eps", c.eps, "eps")->envname("FRAMEWARD_EPS");

  auto* pr = app.add_subcommand("project", "one approximation");
  add_common(pr, c);
  add_target(pr, c, "target id");
  pr->add_option("--method", c.method, "exact | tsvd | oversampled | dual")->capture_default_str()->envname("FRAMEWARD_METHOD");
  pr->add_option("--eps", c.eps, "eps")->envname("FRAMEWARD_EPS");
  pr->add_option("--M", c.M, "rows for oversampled")->envname("FRAMEWARD_M");
  pr->add_option("--gamma", c.gamma, "oversampling factor (sets M)")->envname("FRAMEWARD_GAMMA");
  pr->add_option("--emit-coeffs", c.emit_coeffs, "write coefficients to PATH (stdout without PATH)")
      ->expected(0, 1)
      ->default_str("-")
      ->envname("FRAMEWARD_EMIT_COEFFS");

  auto* st = app.add_subcommand("selftest", "run the acceptance suite");
  st->add_option("--criteria", c.criteria, "criterion numbers (default all)")->envname("FRAMEWARD_CRITERIA");

  try {
    std::vector<std::string> args;
    for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "error: " << e.what() << '\n' << app.help();
    return kUsage;
  }

  try {
    if (spectrum->parsed()) return gram_spectrum(c, out);
    if (cond->parsed()) return condition(c, out, err);
    if (t1->parsed()) return table1(c, out, err);
    if (es->parsed()) return error_sweep_cmd(c, out, err);
    if (os->parsed()) return oversample_cmd(c, out, err);
    if (pr->parsed()) return project_cmd(c, out);
    if (st->parsed()) return selftest(c, out);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return kUsage;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::system_error& e) {
    err << "error: " << e.what() << '\n';
    return kNumerical;
  }
  return kUsage;
}

}  // namespace frameward::cli
