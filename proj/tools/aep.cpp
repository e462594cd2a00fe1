#include <iostream>
#include <string>
#include <vector>

#include "aep/cli.hpp"

int main(int argc, char** argv) {
    return aep::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
