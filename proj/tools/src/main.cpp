#include "cvgauss_cli/commands.hpp"

int main(int argc, char** argv) {
    return cvgauss::cli::run_cli(argc, argv);
}
