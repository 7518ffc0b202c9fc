#include "gsdde/cli/commands.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return gsdde::cli::run(argc, argv, std::cout, std::cerr);
}
