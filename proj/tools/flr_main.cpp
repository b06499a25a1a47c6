#include <iostream>
#include <string>
#include <vector>

#include "flr/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return flr::cli::run(args, std::cout, std::cerr);
}
