#include <cstdlib>
#include <iostream>

#include "fleet/cli/commands.hpp"

int main(int argc, char** argv)
{
    std::ios::sync_with_stdio(false);
    const std::vector<std::string> args(argv + 1, argv + argc);
    return fleet::cli::run_cli(args, std::cout, std::cerr, std::getenv("FLEET_LOG"));
}
