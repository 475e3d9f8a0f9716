// Acceptance suite: runs every criterion and prints one pass/fail line per
// criterion.  Exit status 0 iff everything passed.

#include <cstdio>
#include <cstring>

#include "cutforest/verify.hpp"

int main(int argc, char** argv) {
  uint64_t seed = 0;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::strcmp(argv[i], "--seed") == 0) seed = std::strtoull(argv[i + 1], nullptr, 10);

  bool all_ok = true;
  for (auto& criterion : cutforest::verify::acceptance_criteria()) {
    cutforest::verify::SuiteReport rep;
    bool crashed = false;
    std::string what;
    try {
      rep = criterion.run(seed);
    } catch (const std::exception& e) {
      crashed = true;
      what = e.what();
    }
    bool ok = !crashed && rep.passed();
    std::printf("criterion %2d %-34s %s\n", criterion.number, criterion.title.c_str(),
                ok ? "PASS" : "FAIL");
    if (crashed) std::printf("             exception: %s\n", what.c_str());
    if (!ok && !crashed)
      for (auto& line : rep.lines)
        if (!line.passed)
          std::printf("             failed: %s %s\n", line.name.c_str(), line.detail.c_str());
    all_ok = all_ok && ok;
  }
  return all_ok ? 0 : 1;
}
