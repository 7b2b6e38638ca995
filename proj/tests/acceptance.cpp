// Runs every acceptance criterion at its stated tolerance and prints one
// PASS/FAIL line per criterion. Exit status 1 if any criterion fails.

#include <iostream>

#include "graphheat/validation.hpp"

int main() {
  const auto results = graphheat::validation::run({});
  bool ok = true;
  for (const auto& r : results) {
    std::cout << graphheat::validation::summary_line(r) << '\n';
    for (const auto& d : r.details) std::cout << "    " << d << '\n';
    ok = ok && r.passed;
  }
  std::cout << (ok ? "all criteria passed" : "some criteria failed") << std::endl;
  return ok ? 0 : 1;
}
