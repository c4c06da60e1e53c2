#include "sads_dirac/cli_io.hpp"

int main(int argc, char** argv) { return sads_dirac::cli::run(argc, argv); }
