#include <iostream>

#include "freshness/cli/commands.hpp"

int main(int argc, char** argv) {
    return freshness::cli::run_cli(argc, argv, std::cout, std::cerr);
}
