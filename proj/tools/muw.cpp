#include <iostream>

#include "muw/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return muw::run_cli(args, std::cout, std::cerr);
}
