#include <iostream>
#include <string>
#include <vector>

#include "zipfirm/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return zipfirm::cli::run(args, std::cout, std::cerr);
}
