#include <doctest.h>

#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "frameward");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = frameward::cli::parse_and_dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), {}};
}

std::string line(const std::string& text, int k) {
  std::istringstream is(text);
  std::string l;
  for (int i = 0; i <= k; ++i) std::getline(is, l);
  return l;
}

}  // namespace

TEST_CASE("exit codes") {
  CHECK(run({"--help"}).code == 0);
  const auto unknown = run({"gram-spectrum", "--bogus"});
  CHECK(unknown.code == 2);
  CHECK(unknown.err.find("Usage") != std::string::npos);
  CHECK(run({}).code == 2);
  CHECK(run({"condition-sweep", "--N", "10,11"}).code == 2);
  CHECK(run({"project", "--f", "no-such-function"}).code == 2);
  CHECK(run({"project", "--frame", "fe", "--f", "synthetic-p51"}).code == 2);
  CHECK(run({"error-sweep", "--N", "10", "--methods", "tsvd,bogus"}).code == 2);
  CHECK(run({"oversample-sweep", "--N", "10", "--gamma", "1.5"}).code == 2);
  CHECK(run({"project", "--method", "exact", "--N", "20", "--precision", "64"}).code == 3);
  CHECK(run({"project", "--N", "10", "--out", "/nonexistent-dir/x.csv"}).code == 3);
  CHECK(run({"selftest", "--criteria", "99"}).code == 2);
}

TEST_CASE("records and coefficient files") {
  const auto tmp = std::filesystem::temp_directory_path() / "frameward-cli-test";
  std::filesystem::create_directories(tmp);

  const auto proj = run({"project", "--frame", "augf", "--K", "8", "--f", "pole", "--N", "64", "--eps", "1e-8",
                         "--emit-coeffs", (tmp / "c.txt").string()});
  REQUIRE(proj.code == 0);
  const auto sweep = run({"error-sweep", "--frame", "augf", "--K", "8", "--f", "pole", "--N", "64",
                          "--eps", "1e-8", "--methods", "tsvd", "--quiet"});
  REQUIRE(sweep.code == 0);
  CHECK(line(proj.out, 0) == line(sweep.out, 0));
  CHECK(line(proj.out, 1) == line(sweep.out, 1));
  const auto coeffs = slurp(tmp / "c.txt");
  CHECK(line(coeffs, 0) == "index re im");
  CHECK(line(coeffs, 1).rfind("legendre(1) ", 0) == 0);
  CHECK(line(coeffs, 65).empty());
  CHECK(!line(coeffs, 64).empty());

  // Same configuration, byte-identical output.
  const std::vector<std::string> args{"oversample-sweep", "--N", "20:40:10", "--gamma", "1,2", "--quiet"};
  auto a = args, b = args;
  a.insert(a.end(), {"--out", (tmp / "a.csv").string()});
  b.insert(b.end(), {"--out", (tmp / "b.csv").string(), "--threads", "2"});
  REQUIRE(run(a).code == 0);
  REQUIRE(run(b).code == 0);
  CHECK(slurp(tmp / "a.csv") == slurp(tmp / "b.csv"));
  CHECK(slurp(tmp / "a.csv").find("NA\n") != std::string::npos);

  const auto timed = run({"condition-sweep", "--N", "4,6", "--record-timing"});
  CHECK(line(timed.out, 1).substr(line(timed.out, 1).rfind(',') + 1) != "NA");
  CHECK(timed.err.find("# N=4 done (") == 0);

  const auto spec = run({"gram-spectrum", "--frame", "augortho", "--N", "3", "--precision", "128",
                         "--plot", (tmp / "s.dat").string()});
  CHECK(line(spec.out, 0) == "n,sigma");
  CHECK(line(slurp(tmp / "s.dat"), 0) == "n sigma");
  std::filesystem::remove_all(tmp);
}

TEST_CASE("environment fallbacks") {
  setenv("FRAMEWARD_N", "6", 1);
  const auto env = run({"condition-sweep", "--quiet"});
  CHECK(line(env.out, 1).rfind("fe,T=2,NA,6,", 0) == 0);
  const auto flag = run({"condition-sweep", "--quiet", "--N", "8"});
  CHECK(line(flag.out, 1).rfind("fe,T=2,NA,8,", 0) == 0);
  unsetenv("FRAMEWARD_N");
}
