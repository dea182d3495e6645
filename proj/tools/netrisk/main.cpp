#include <iostream>
#include <string>
#include <vector>

#include "netrisk/commands.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return netrisk::cli::run_cli(args, std::cout, std::cerr);
}
