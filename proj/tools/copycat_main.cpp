#include <iostream>
#include <string>
#include <vector>

#include "copycat/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return copycat::run_cli(args, std::cout, std::cerr);
}
