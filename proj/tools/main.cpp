#include <iostream>

#include "rectflow/cli.hpp"

int main(int argc, char** argv) {
    return rectflow::cli::run(argc, argv, std::cout, std::cerr);
}
