#include <iostream>
#include <string>
#include <vector>

#include "distwatch/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return distwatch::cli::run(args, std::cout, std::cerr);
}
