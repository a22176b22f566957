#include <iostream>
#include <string>
#include <vector>

#include "anndyn/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return anndyn::cli::run(args, std::cout, std::cerr);
}
