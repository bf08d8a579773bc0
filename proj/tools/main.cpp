#include <iostream>

#include "feeddrive/cli.hpp"

int main(int argc, char** argv) {
    return feeddrive::run_cli(argc, argv, std::cout, std::cerr);
}
