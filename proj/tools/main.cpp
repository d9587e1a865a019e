#include "cli.hpp"

int main(int argc, char** argv) { return prb::cli::main(argc, argv); }
