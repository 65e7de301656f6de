#include <iostream>

#include "bendbench/cli.hpp"

int main(int argc, char** argv) {
  return bendbench::cli::run(argc, argv, std::cout, std::cerr);
}
