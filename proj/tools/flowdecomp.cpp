#include <iostream>

#include "flowdecomp/cli.hpp"

int main(int argc, char** argv) { return flowdecomp::run_cli(argc, argv, std::cout, std::cerr); }
