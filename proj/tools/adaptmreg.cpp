#include <iostream>

#include "adaptm/cli.hpp"

int main(int argc, char** argv) { return adaptm::run_cli(argc, argv, std::cout, std::cerr); }
