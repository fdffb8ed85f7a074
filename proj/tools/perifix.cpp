#include <iostream>
#include <string>
#include <vector>

#include "perifix/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return perifix::cli::run_command(args, std::cout, std::cerr);
}
