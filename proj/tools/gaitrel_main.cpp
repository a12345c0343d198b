#include <iostream>
#include <string>
#include <vector>

#include "gaitrel/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return gaitrel::cli::run(args, std::cout, std::cerr);
}
