#include <cstdio>
#include <exception>

#include "hierobs/acceptance.hpp"

int main() {
  try {
    const hierobs::RunConfig cfg = hierobs::load_config(HIEROBS_DEFAULT_CONFIG);
    int failures = 0;
    for (const auto& r : hierobs::run_acceptance_suite(cfg)) {
      std::printf("%s\n", hierobs::format_result(r).c_str());
      if (!r.passed) ++failures;
    }
    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "acceptance: %s\n", e.what());
    return 2;
  }
}
