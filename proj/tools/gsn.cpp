#include "gsn/cli.hpp"

int main(int argc, char** argv) { return gsn::cli::run_cli(argc, argv); }
