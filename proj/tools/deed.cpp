#include <iostream>
#include <string>
#include <vector>

#include "deed/cli.hpp"

int main(int argc, char** argv) {
  return deed::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
