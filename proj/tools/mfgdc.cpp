#include <iostream>

#include "mfgdc/cli/commands.hpp"

int main(int argc, char** argv) { return mfgdc::cli::run(argc, argv, std::cout, std::cerr); }
