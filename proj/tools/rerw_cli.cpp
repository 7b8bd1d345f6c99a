#include <rerw/cli.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    return rerw::cli::run_cli(argc, argv, std::cout, std::cerr);
}
