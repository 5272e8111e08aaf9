#include <string>
#include <vector>

#include "grg/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return grg::cli::run(std::move(args));
}
