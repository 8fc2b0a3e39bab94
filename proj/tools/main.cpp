#include <iostream>

#include "ssched/cli.hpp"

int main(int argc, char** argv) {
  return ssched::cli::run(argc, argv, std::cin, std::cout, std::cerr);
}
