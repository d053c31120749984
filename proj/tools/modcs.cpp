#include <iostream>

#include "modcs/cli.hpp"

int main(int argc, char** argv) {
  return modcs::cli::run(argc, argv, std::cout, std::cerr);
}
