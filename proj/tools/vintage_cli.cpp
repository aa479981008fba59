#include <iostream>

#include "vintage/cli.hpp"

int main(int argc, char** argv) { return vintage::cli::run(argc, argv, std::cout, std::cerr); }
