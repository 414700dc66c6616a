#include <iostream>

#include "glassey/cli.hpp"

int main(int argc, char** argv) { return glassey::cli::run_cli(argc, argv, std::cout, std::cerr); }
