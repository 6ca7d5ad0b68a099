#include <iostream>

#include "hdmean/cli.hpp"

int main(int argc, char** argv) { return hdmean::run_cli(argc, argv, std::cout, std::cerr); }
