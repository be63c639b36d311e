#include <iostream>
#include <string>
#include <vector>

#include "symspace/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return symspace::cli::run(std::move(args), std::cout, std::cerr);
}
