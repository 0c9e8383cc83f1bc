#include <iostream>

#include "wgd/cli.hpp"

int main(int argc, char **argv) { return wgd::run_cli(argc, argv, std::cout, std::cerr); }
