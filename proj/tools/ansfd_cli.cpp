#include <iostream>
#include <string>
#include <vector>

#include "ansfd/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ansfd::cli::run(args, std::cout, std::cerr);
}
