#include <iostream>

#include "fselids/cli.hpp"

int main(int argc, char** argv) { return fsel::run_cli(argc, argv, std::cout, std::cerr); }
