#include <iostream>

#include "drv/cli.hpp"

int main(int argc, char** argv) { return drv::cli::run_main(argc, argv, std::cout, std::cerr); }
