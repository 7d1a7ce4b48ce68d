#include <iostream>

#include "beltrami/cli.hpp"

int main(int argc, char** argv) { return beltrami::cli_main(argc, argv, std::cout, std::cerr); }
