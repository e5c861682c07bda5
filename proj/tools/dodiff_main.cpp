#include <iostream>

#include "dodiff/cli.hpp"

int main(int argc, char** argv) { return dodiff::cli::run(argc, argv, std::cout, std::cerr); }
