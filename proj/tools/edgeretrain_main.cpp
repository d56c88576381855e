#include "edgeretrain/cli.hpp"

int main(int argc, char** argv) { return edgeretrain::cli_main(argc, argv); }
