#include <iostream>
#include <string>
#include <vector>

#include "selval/cli.hpp"

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv, argv + argc);
    return selval::run_cli(args, std::cout, std::cerr);
}
