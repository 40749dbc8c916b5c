#include <iostream>

#include "thermoharvest/cli.hpp"

int main(int argc, char** argv) {
    return thermoharvest::run_command(argc, argv, std::cout, std::cerr);
}
