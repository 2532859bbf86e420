#include <iostream>

#include "robust_shannon/cli.hpp"

int main(int argc, char** argv) { return robust_shannon::cli::main(argc, argv, std::cout, std::cerr); }
