#include "bbbc/cli.hpp"

int main(int argc, char** argv) { return bbbc::cli_main(argc, argv); }
