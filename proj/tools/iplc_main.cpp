#include <iostream>

#include "cli/cli.hpp"

int main(int argc, char** argv) {
  return iplc::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cin, std::cout, std::cerr);
}
