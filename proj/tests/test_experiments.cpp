#include <doctest.h>

#include "frameward/errors.hpp"
#include "frameward/experiments.hpp"

#include <cmath>
#include <sstream>

using namespace frameward;

TEST_CASE("spectrum experiment") {
  const auto s = spectrum_experiment(FrameSpec::fourier_extension(2.0), 50, 256);
  REQUIRE(s.size() == 50);
  CHECK(std::is_sorted(s.rbegin(), s.rend()));
  const auto near1 = std::count_if(s.begin(), s.end(), [](double v) { return v > 0.9; });
  const auto near0 = std::count_if(s.begin(), s.end(), [](double v) { return v < 0.1; });
  // Plunge region of width O(log N) around N/T = 25.
  CHECK(near1 >= 18);
  CHECK(near0 >= 18);
  CHECK(near1 + near0 <= 50);
  CHECK(near1 + near0 >= 40);

  const auto ao = spectrum_experiment(FrameSpec::augmented_orthonormal(), 50, 256);
  double r2 = 0;
  for (long n = 1; n < 50; ++n) r2 += std::pow(std::sqrt(90.0) / (M_PI * M_PI) / (n * n), 2);
  CHECK(ao.front() == doctest::Approx(1 + std::sqrt(r2)).epsilon(1e-14));
  CHECK(ao.back() == doctest::Approx(1 - std::sqrt(r2)).epsilon(1e-12));
  for (std::size_t i = 1; i + 1 < ao.size(); ++i) CHECK(std::abs(ao[i] - 1.0) <= 1e-15);
  CHECK_THROWS_AS(spectrum_experiment(FrameSpec::fourier_extension(2.0), 7, 64), InvalidArgument);
}

TEST_CASE("condition sweep growth laws") {
  const auto fe = condition_sweep(FrameSpec::fourier_extension(2.0), {20, 22, 24, 26, 28, 30});
  const double E = 3 + 2 * std::sqrt(2.0);
  CHECK(fe.bound_label == "E(T)^N");
  for (std::size_t i = 0; i < fe.records.size(); ++i) {
    const auto& r = fe.records[i];
    CHECK(*r.kappa == *r.B_N / *r.A_N);
    CHECK(*r.precision_bits == required_bits(FrameSpec::fourier_extension(2.0), r.N));
    CHECK(fe.bound[i] == doctest::Approx(std::pow(E, double(r.N))).epsilon(1e-9));
  }
  const double ratio = *fe.records.back().kappa / *fe.records[fe.records.size() - 2].kappa;
  CHECK(ratio > 0.8 * E * E);
  CHECK(ratio < 1.2 * E * E);

  std::vector<long> Ns;
  for (long N = 24; N <= 64; N += 8) Ns.push_back(N);
  const auto af = condition_sweep(FrameSpec::augmented_fourier(4), Ns, PrecisionPolicy::fixed(53));
  std::vector<double> x, y;
  for (const auto& r : af.records) {
    x.push_back(std::log(double(r.N)));
    y.push_back(std::log(*r.kappa));
  }
  CHECK(asymptotic_slope(x, y) >= 6.5);

  CHECK_THROWS_AS(condition_sweep(FrameSpec::fourier_extension(2.0), {20, 10}), InvalidArgument);
}

TEST_CASE("coefficient table") {
  const auto fe = FrameSpec::fourier_extension(2.0);
  const auto t = coefficient_table(fe, {"exp", "runge16"}, {10, 20});
  REQUIRE(t.size() == 4);
  CHECK(*t[0].f_id == "exp");
  CHECK(t[1].N == 20);
  CHECK(*t[2].f_id == "runge16");
  CHECK(*t[0].coeff_norm == doctest::Approx(1.768).epsilon(1e-3));
  CHECK(*t[1].coeff_norm == doctest::Approx(1.807).epsilon(1e-3));
  CHECK(*t[3].coeff_norm == doctest::Approx(50.46).epsilon(1e-3));
  CHECK(*t[0].kappa == *t[2].kappa);

  const auto refused = coefficient_table(fe, {"exp"}, {20}, PrecisionPolicy::fixed(64));
  CHECK_FALSE(refused[0].coeff_norm);
  CHECK_FALSE(refused[0].kappa);
  CHECK(refused[0].note.find("needs") != std::string::npos);
}

TEST_CASE("error and oversampling sweeps") {
  const auto fe = FrameSpec::fourier_extension(2.0);
  SweepOptions opts;
  std::vector<std::string> lines;
  opts.progress = [&](const std::string& s) { lines.push_back(s); };
  const auto recs = error_sweep(fe, "runge25", {20, 40}, {1e-4, 1e-8},
                                {Method::exact, Method::tsvd, Method::dual}, {}, opts);
  REQUIRE(recs.size() == 8);
  CHECK(*recs[0].method == "exact");
  CHECK(*recs[1].method == "tsvd");
  CHECK(*recs[1].eps == 1e-4);
  CHECK(*recs[2].eps == 1e-8);
  CHECK(*recs[3].method == "dual");
  CHECK(recs[4].N == 40);
  CHECK(recs[0].kappa);
  CHECK_FALSE(recs[1].kappa);
  CHECK_FALSE(recs[3].eps);
  CHECK(*recs[4].l2_error < *recs[0].l2_error);
  CHECK(lines.size() == 2);
  CHECK(lines[0].rfind("# N=20 done (", 0) == 0);

  const auto os1 = oversample_sweep(fe, "runge25", {1.0, 2.0}, {20, 40}, 1e-8);
  REQUIRE(os1.size() == 4);
  CHECK(*os1[0].M == 20);
  CHECK(*os1[2].M == 40);
  CHECK(*os1[3].M == 80);
  // gamma = 1 reproduces the square tsvd records.
  CHECK(*os1[0].l2_error == *recs[2].l2_error);
  CHECK(*os1[0].coeff_norm == *recs[2].coeff_norm);
  CHECK(*os1[1].l2_error == *recs[6].l2_error);
  CHECK_THROWS_AS(oversample_sweep(fe, "runge25", {1.5}, {10}, 1e-8), InvalidArgument);
  CHECK_THROWS_AS(oversample_sweep(fe, "runge25", {0.5}, {10}, 1e-8), InvalidArgument);
  CHECK_THROWS_AS(error_sweep(fe, "runge25", {20}, {1e-8}, {Method::oversampled}), InvalidArgument);

  SweepOptions par;
  par.threads = 3;
  const auto os2 = oversample_sweep(fe, "runge25", {1.0, 2.0}, {20, 40}, 1e-8, par);
  std::ostringstream a, b;
  write_csv(os1, a);
  write_csv(os2, b);
  CHECK(a.str() == b.str());
}

TEST_CASE("csv and plot data") {
  std::ostringstream empty;
  write_csv({}, empty);
  CHECK(empty.str() == std::string(kCsvHeader) + "\n");

  SweepRecord r;
  r.family = "fe";
  r.params = "T=2";
  r.N = 4;
  r.set_bounds(frame_bounds(hermitian_eig<double>(CMatrix<double>::Identity(4, 4))));
  r.l2_error = 0.1;
  r.precision_bits = 53;
  std::ostringstream os;
  write_csv({r}, os);
  CHECK(os.str() == std::string(kCsvHeader) + "\nfe,T=2,NA,4,NA,NA,NA,0.1,NA,1,1,1,NA,53,NA\n");
  CHECK(os.str().find('\r') == std::string::npos);

  CHECK(format_real(1.0 / 3) == "0.3333333333333333");
  CHECK(std::stod(format_real(1.0 / 3)) == 1.0 / 3);
  CHECK(format_real(1e-300) == "1e-300");
  CHECK(format_real(std::nullopt) == "NA");

  std::ostringstream pd;
  write_plot_data({r}, {"N", "kappa", "coeff_norm"}, pd);
  CHECK(pd.str() == "N kappa coeff_norm\n4 1 NA\n");
  std::ostringstream pd2;
  write_plot_table({"n", "sigma"}, {{1, 0.5}, {2, 0.25}}, pd2);
  CHECK(pd2.str() == "n sigma\n1 0.5\n2 0.25\n");
  CHECK_THROWS_AS(write_plot_data({r}, {"bogus"}, pd), InvalidArgument);
  CHECK_THROWS(write_csv({r}, "/nonexistent-dir/x.csv"));
}

TEST_CASE("slope fitting") {
  CHECK(fit_slope({1, 2, 3}, {2, 4, 6}) == doctest::Approx(2.0));
  CHECK(asymptotic_slope({0, 1, 2, 3, 4, 5, 6}, {100, 0, 1, 2, 3, 4, 5}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(fit_slope({1}, {1}), InvalidArgument);
}
