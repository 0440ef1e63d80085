#include <iostream>
#include <string>
#include <vector>

#include "oowm/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return oowm::cli::run(args, std::cout, std::cerr);
}
