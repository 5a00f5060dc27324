#include <iostream>

#include "sfwm/cli.hpp"

int main(int argc, char** argv) { return sfwm::run_cli(argc, argv, std::cout, std::cerr); }
