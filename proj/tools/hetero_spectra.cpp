#include <iostream>

#include "hetero_spectra/cli/commands.hpp"

int main(int argc, char** argv) {
  return hs::cli::run_cli(argc, argv, std::cout, std::cerr);
}
