#include <iostream>

#include "hypharm/cli.hpp"

int main(int argc, char** argv) { return hypharm::cli::run(argc, argv, std::cout, std::cerr); }
