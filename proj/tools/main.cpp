#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return l2approx::cli::run(argc, argv, std::cout, std::cerr); }
