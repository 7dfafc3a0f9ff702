#include <iostream>

#include "lfdd/cli.hpp"

int main(int argc, char** argv) { return lfdd::run_cli(argc, argv, std::cout, std::cerr); }
