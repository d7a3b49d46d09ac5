#include <iostream>
#include <string>
#include <vector>

#include "gebench/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return gebench::cli_dispatch(args, std::cout, std::cerr);
}
