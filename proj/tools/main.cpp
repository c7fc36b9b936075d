#include <iostream>

#include "epsrob/cli.hpp"

int main(int argc, char** argv) {
  return epsrob::run_cli(argc, argv, std::cout, std::cerr);
}
