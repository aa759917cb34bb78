#include <clocale>
#include <iostream>
#include <string>
#include <vector>

#include "hvt/cli.hpp"

int main(int argc, char** argv) {
    std::setlocale(LC_ALL, "C");
    std::vector<std::string> args(argv + 1, argv + argc);
    return hvt::cli_run(std::move(args), std::cout, std::cerr);
}
