#include <iostream>

#include "sepform/cli.hpp"

int main(int argc, char** argv) { return sepform::cli::run(argc, argv, std::cout, std::cerr); }
