// Runs the acceptance criteria and prints one PASS/FAIL line per criterion.
// Arguments select criteria by number; none runs all of them.

#include "frameward/acceptance.hpp"

#include <cstdio>
#include <cstdlib>
#include <string>

int main(int argc, char** argv) {
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  int failed = 0;
  frameward::run_acceptance(ids, [&](const frameward::CriterionResult& r) {
    std::printf("%s\n", frameward::format_result(r).c_str());
    std::fflush(stdout);
    if (!r.passed) ++failed;
  });
  std::printf("%d of %zu criteria failed\n", failed, ids.empty() ? std::size_t(frameward::kAcceptanceCount) : ids.size());
  return failed == 0 ? 0 : 1;
}
