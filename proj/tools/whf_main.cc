#include <iostream>

#include "whf/cli.h"

int main(int argc, char** argv) {
  return whf::run_cli(argc, argv, std::cout, std::cerr);
}
