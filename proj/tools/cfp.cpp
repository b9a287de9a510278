#include "cfp/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return cfp::main_entry(argc, argv, std::cout, std::cerr); }
