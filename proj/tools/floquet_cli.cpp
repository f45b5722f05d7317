#include <iostream>

#include "floquet/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return floquet::cli::run(args, std::cout, std::cerr);
}
