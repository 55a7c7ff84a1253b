#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) {
    return ndcli::run(argc, argv, std::cout, std::cerr);
}
