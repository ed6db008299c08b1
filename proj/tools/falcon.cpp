#include <iostream>

#include "falcon/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return falcon::run_cli(args, std::cout, std::cerr);
}
