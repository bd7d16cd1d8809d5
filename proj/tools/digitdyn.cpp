#include <iostream>
#include <string>
#include <vector>

#include "digitdyn/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return digitdyn::cli_dispatch(std::move(args), std::cout, std::cerr);
}
