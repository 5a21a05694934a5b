#include <iostream>
#include <string>
#include <vector>

#include "bcw/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return bcw::cli::run(args, std::cout, std::cerr);
}
