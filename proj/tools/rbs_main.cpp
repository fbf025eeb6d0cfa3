#include <iostream>
#include <string>
#include <vector>

#include "rbs/commands.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return rbs::cli::run(args, std::cout, std::cerr);
}
