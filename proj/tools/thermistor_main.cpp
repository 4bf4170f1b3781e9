#include "thermistor/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return thermistor::cli::run(argc, argv, std::cout, std::cerr);
}
