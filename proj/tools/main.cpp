#include "cli.hpp"

int main(int argc, char** argv) { return dada::cli_main(argc, argv); }
