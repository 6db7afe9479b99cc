#include <iostream>

#include "trailmap/tools/cli.hpp"

int main(int argc, char** argv) {
  return trailmap::tools::run_cli(argc, argv, std::cout, std::cerr);
}
