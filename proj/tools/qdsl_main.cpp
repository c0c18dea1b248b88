#include <iostream>

#include "qdsl/cli/cli.hpp"

int main(int argc, char** argv) { return qdsl::cli::main(argc, argv, std::cout, std::cerr); }
