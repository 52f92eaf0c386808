#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return robust_trade::cli::run(argc, argv, std::cout, std::cerr); }
