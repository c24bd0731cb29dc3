#include <iostream>

#include "msls_cli.hpp"

int main(int argc, char** argv) { return msls::cli::run(argc, argv, std::cout, std::cerr); }
