#include "lwall_cli.hpp"

int main(int argc, char** argv) { return lwall::cli::run(argc, argv); }
