#include <iostream>

#include "topotrace/cli.hpp"

int main(int argc, char** argv) {
    return topotrace::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
