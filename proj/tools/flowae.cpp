#include "flowae/cli.hpp"

int main(int argc, char** argv)
{
    return flowae::cli::run_cli(argc, argv);
}
