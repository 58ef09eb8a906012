#include <iostream>

#include "monoculture/cli.hpp"

int main(int argc, char** argv) { return monoculture::cli::run(argc, argv, std::cout, std::cerr); }
