#include "nblod/cli.hpp"

int main(int argc, char** argv) { return nblod::cli_main(argc, argv); }
