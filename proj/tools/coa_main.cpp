#include <iostream>
#include <string>
#include <vector>

#include "coa/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return coa::cli::run(args, std::cout, std::cerr);
}
