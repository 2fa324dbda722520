#include <iostream>

#include "pendamp/tools/cli.hpp"

int main(int argc, char** argv) { return pendamp::tools::run(argc, argv, std::cout, std::cerr); }
