#include <iostream>

#include "twistlab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return twistlab::cli::run(args, std::cout, std::cerr);
}
