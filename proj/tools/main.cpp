#include <iostream>
#include <string>
#include <vector>

#include "rpe/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return rpe::run_cli(args, std::cout, std::cerr);
}
