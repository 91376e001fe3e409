#include <iostream>

#include "primefock/cli.hpp"

int main(int argc, char** argv) { return primefock::cli::run(argc, argv, std::cout, std::cerr); }
