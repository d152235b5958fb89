#include <iostream>

#include "hyobs/cli/commands.hpp"

int main(int argc, char** argv) { return hyobs::cli::run(argc, argv, std::cout, std::cerr); }
