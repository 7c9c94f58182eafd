// Runs every acceptance criterion at its stated tolerance and prints one line per criterion.
// The exit status is nonzero only when a criterion could not be evaluated at all.

#include <cstdio>
#include <iostream>

#include "checks.hpp"

int main() {
  using namespace qtrace::checks;
  const Options o;
  int passed = 0, unevaluated = 0;
  for (int id = 1; id <= kCheckCount; ++id) {
    const auto r = run_check(id, o);
    const char* tag = !r.evaluated ? "ERROR" : r.pass ? "PASS" : "FAIL";
    std::printf("%-5s criterion %2d  %-28s %8.1f s  %s\n", tag, r.id, r.name.c_str(), r.seconds, r.summary.c_str());
    std::fflush(stdout);
    passed += r.pass && r.evaluated;
    unevaluated += !r.evaluated;
  }
  std::printf("%d of %d criteria pass\n", passed, kCheckCount);
  return unevaluated == 0 ? 0 : 2;
}
