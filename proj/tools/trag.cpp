#include <iostream>

#include "trag/cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return trag::cli::run(args, std::cout, std::cerr);
}
