#include <iostream>
#include <string>
#include <vector>

#include "covparse/cli.h"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return covparse::run_cli(args, std::cout, std::cerr);
}
