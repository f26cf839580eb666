#include "fastfrechet/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return fastfrechet::cli::run(argc, argv, std::cout, std::cerr); }
