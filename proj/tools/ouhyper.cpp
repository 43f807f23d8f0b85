#include <iostream>

#include "ouhyper/cli.hpp"

int main(int argc, char** argv) { return ouhyper::cli::run_cli(argc, argv, std::cout, std::cerr); }
