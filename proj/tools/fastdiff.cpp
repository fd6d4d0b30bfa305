#include <iostream>

#include "fastdiff/cli.hpp"

int main(int argc, char** argv) { return fastdiff::cli::run(argc, argv, std::cout, std::cerr); }
