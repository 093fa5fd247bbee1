#include <iostream>

#include "riskflow/cli/cli.hpp"

int main(int argc, char** argv) { return riskflow::cli::run(argc, argv, std::cout, std::cerr); }
