#include <iostream>
#include <vector>

#include "ltt/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return ltt::cli_main(args, std::cout, std::cerr);
}
