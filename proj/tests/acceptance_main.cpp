// Prints one PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <cstring>
#include <iostream>

#include "pendamp/tools/acceptance.hpp"

int main(int argc, char** argv) {
  pendamp::tools::AcceptanceOptions opt;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--fast") == 0) opt.fast = true;
  }
  int failed = 0;
  pendamp::tools::run_acceptance(opt, [&](const pendamp::tools::CriterionResult& r) {
    std::cout << pendamp::tools::format_result(r) << std::endl;
    if (!r.pass) ++failed;
  });
  std::cout << (failed == 0 ? "all criteria passed" : "some criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
