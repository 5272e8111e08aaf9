// Acceptance runner: executes the numbered criteria (all by default) and
// prints one pass/fail line each. Nonzero exit on any failure.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "grg/acceptance.hpp"

int main(int argc, char** argv) {
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) {
    try {
      ids.push_back(std::stoi(argv[i]));
    } catch (const std::exception&) {
      std::cerr << "usage: " << argv[0] << " [criterion-number...]\n";
      return 2;
    }
  }
  if (ids.empty())
    for (int id = 1; id <= grg::acceptance::kCriterionCount; ++id)
      ids.push_back(id);
  try {
    const int failures = grg::acceptance::run_and_report(ids, std::cout);
    return failures == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
