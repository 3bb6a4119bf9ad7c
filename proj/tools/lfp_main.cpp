#include <iostream>
#include <string>
#include <vector>

#include "lfp/cli.hpp"

int main(int argc, char** argv) {
  return lfp::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
