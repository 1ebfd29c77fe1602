#include <iostream>

#include "wfsim/cli.hpp"

int main(int argc, char** argv) { return wfsim::cli::run(argc, argv, std::cout, std::cerr); }
