#include <iostream>

#include "authalic/cli.hpp"

int main(int argc, char** argv) { return authalic::run_cli(argc, argv, std::cout, std::cerr); }
