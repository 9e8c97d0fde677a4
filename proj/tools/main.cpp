#include <iostream>

#include "gedf/cli.hpp"

int main(int argc, char** argv) { return gedf::cli::run(argc, argv, std::cout, std::cerr); }
