#include "conley/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return conley::cli_main(argc, argv, std::cout, std::cerr);
}
