#include <iostream>
#include <string>
#include <vector>

#include "qgrom/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return qgrom::cli::run(args, std::cout, std::cerr);
}
