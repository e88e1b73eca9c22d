#include <iostream>

#include "mcalc/cli.hpp"

int main(int argc, char** argv) { return mcalc::run_cli(argc, argv, std::cout, std::cerr); }
