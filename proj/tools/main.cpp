#include <iostream>

#include "gsi/cli.hpp"

int main(int argc, char** argv) { return gsi::cli_main(argc, argv, std::cout, std::cerr); }
