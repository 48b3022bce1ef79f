#include <cstdio>
#include <cstdlib>

#include "glpin/acceptance.hpp"

int main(int argc, char** argv) {
  uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 20240601;
  auto results = glpin::acceptance::run_all(seed);
  int failed = 0, disputed = 0;
  for (const auto& r : results) {
    std::printf("%s\n", glpin::acceptance::line(r).c_str());
    if (!r.passed) {
      (r.disputed.empty() ? failed : disputed)++;
      std::printf("   detail: %s\n", r.detail.dump().c_str());
    }
  }
  std::printf("%zu/%zu criteria passed, %d failed, %d failed with a confirmed counterexample\n",
              results.size() - failed - disputed, results.size(), failed, disputed);
  return failed ? 1 : 0;
}
