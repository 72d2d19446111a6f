#include "grg/cli.hpp"

int main(int argc, char** argv) { return grg::run_cli(argc, argv); }
