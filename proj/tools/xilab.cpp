#include "xilab/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return xilab::cli::run(argc, argv, std::cout, std::cerr);
}
