#include <iostream>

#include "billiard/cli.hpp"

int main(int argc, char** argv) {
    return billiard::run_cli(argc, argv, std::cout, std::cerr);
}
