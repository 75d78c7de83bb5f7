#include <iostream>

#include "gwpcor/cli.hpp"

int main(int argc, char** argv)
{
    return gwpcor::cli::run(argc, argv, std::cout, std::cerr);
}
