#include "maxcgo/cli.hpp"

int main(int argc, char** argv) { return maxcgo::run_cli(argc, argv); }
