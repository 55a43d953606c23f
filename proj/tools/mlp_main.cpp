#include <iostream>
#include <string>
#include <vector>

#include "mlp/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return mlp::cli::run(args, std::cout, std::cerr);
}
