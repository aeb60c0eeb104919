#include "cli.hpp"

int main(int argc, char** argv)
{
    return crossprod::cli::run(argc, argv, std::cout, std::cerr);
}
