#pragma once

// Sweep drivers producing tabular records: spectra, condition numbers,
// coefficient norms of exact projections, L^2 errors and oversampling
// comparisons.  CSV and plot-data writers.

#include "frameward/approx.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace frameward {

/// One row of a sweep.  Unset optionals serialize as NA.
struct SweepRecord {
  std::string family;
  std::string params;
  std::optional<std::string> f_id;
  long N = 0;
  std::optional<long> M;
  std::optional<double> eps;
  std::optional<std::string> method;
  std::optional<double> l2_error;
  std::optional<double> coeff_norm;
  std::optional<double> A_N;
  std::optional<double> B_N;
  std::optional<double> kappa;
  std::optional<long> rank_kept;
  std::optional<int> precision_bits;
  std::optional<double> wall_time_ms;
  /// Why a cell is NA (refusals); not serialized.
  std::string note;

  void set_bounds(const FrameBounds& fb);
};

/// Precision selection per N: bits <= 0 applies the precision rule
/// (required_bits), otherwise the fixed bit count.  Fixed counts below
/// required_bits make exact solves refuse.
struct PrecisionPolicy {
  int bits = 0;
  static PrecisionPolicy automatic() { return {}; }
  static PrecisionPolicy fixed(int b) { return {b}; }
  bool is_auto() const { return bits <= 0; }
  int bits_for(const FrameSpec& spec, long N) const;
};

struct SweepOptions {
  /// Worker threads for double-precision tasks.  Multiprecision tasks run
  /// one at a time (the MPFR default precision is process-wide).
  int threads = 1;
  /// Fill wall_time_ms; off by default so reruns are byte-identical.
  bool record_timing = false;
  /// Receives "# N=.. done (t ms)" lines.
  std::function<void(const std::string&)> progress;
  /// Absolute L^2 error tolerance for double-precision approximants.
  double error_tol = 1e-14;
  /// Same for exact projections evaluated in multiprecision.
  double exact_error_tol = 1e-20;
  /// Quadrature tolerance for double-precision right-hand sides.
  double rhs_tol = 1e-14;
};

/// Eigenvalues of G_N, descending.  bits <= 53 computes in double.
std::vector<double> spectrum_experiment(const FrameSpec& spec, long N, int bits);

struct ConditionSweep {
  std::vector<SweepRecord> records;
  /// Theoretical growth law per record: E(T)^N, N^{2K-1}, 4^N, or the
  /// closed form (1+r)/(1-r) for the augmented orthonormal family.
  std::vector<double> bound;
  std::string bound_label;
};

ConditionSweep condition_sweep(const FrameSpec& spec, const std::vector<long>& N_list,
                               PrecisionPolicy policy = {}, const SweepOptions& opts = {});

/// ||x|| of the exact projection per (f, N), f-major.  One factorization
/// per N is shared by all targets.  Refusals leave coeff_norm NA and fill
/// note.
std::vector<SweepRecord> coefficient_table(const FrameSpec& spec,
                                           const std::vector<std::string>& f_ids,
                                           const std::vector<long>& N_list,
                                           PrecisionPolicy policy = {},
                                           const SweepOptions& opts = {});

/// Records ordered by N, then method in the given order, then eps.  exact
/// runs under the policy; tsvd and dual run in double.  Only exact records
/// carry A_N, B_N and kappa.
std::vector<SweepRecord> error_sweep(const FrameSpec& spec, const std::string& f_id,
                                     const std::vector<long>& N_list,
                                     const std::vector<double>& eps_list,
                                     const std::vector<Method>& methods,
                                     PrecisionPolicy policy = {}, const SweepOptions& opts = {});

/// M = round(gamma N), which must be admissible.  Records ordered by gamma,
/// then N; method oversampled in double.
std::vector<SweepRecord> oversample_sweep(const FrameSpec& spec, const std::string& f_id,
                                          const std::vector<double>& gammas,
                                          const std::vector<long>& N_list, double eps,
                                          const SweepOptions& opts = {});

long oversampled_rows(const FrameSpec& spec, double gamma, long N);

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);
/// Slope over the last `window` points.
double asymptotic_slope(const std::vector<double>& x, const std::vector<double>& y,
                        std::size_t window = 5);

/// Shortest decimal that round-trips, NA for absent values.
std::string format_real(std::optional<double> v);

inline constexpr const char* kCsvHeader =
    "family,params,f_id,N,M,eps,method,l2_error,coeff_norm,A_N,B_N,kappa,rank_kept,"
    "precision_bits,wall_time_ms";

void write_csv(const std::vector<SweepRecord>& records, std::ostream& os);
/// Throws std::system_error when the file cannot be written.
void write_csv(const std::vector<SweepRecord>& records, const std::string& path);

/// Whitespace-separated columns under a single header line.  Columns are
/// named as in the CSV header.
void write_plot_data(const std::vector<SweepRecord>& records,
                     const std::vector<std::string>& columns, std::ostream& os);
void write_plot_table(const std::vector<std::string>& columns,
                      const std::vector<std::vector<double>>& rows, std::ostream& os);

}  // namespace frameward
