#include "kolmofix/cli.hpp"

int main(int argc, char** argv) { return kolmofix::cli_main(argc, argv); }
