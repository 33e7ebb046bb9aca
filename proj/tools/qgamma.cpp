#include <iostream>

#include "qgamma/cli.hpp"

int main(int argc, char** argv) { return qgamma::cli::dispatch(argc, argv, std::cout, std::cerr); }
