#include <iostream>

#include "ahcrf/cli.hpp"

int main(int argc, char** argv) { return ahcrf::run_cli(argc, argv, std::cout, std::cerr); }
