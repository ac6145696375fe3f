#include "rstlab/cli.hpp"

int main(int argc, char** argv) { return rstlab::run_cli(argc, argv); }
