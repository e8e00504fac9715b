#include <iostream>

#include "bcert/cli.hpp"

int main(int argc, char** argv) { return bcert::run_cli(argc, argv, std::cout, std::cerr); }
