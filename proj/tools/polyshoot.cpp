#include "polyshoot/cli.hpp"

int main(int argc, char** argv) { return polyshoot::cli::run(argc, argv); }
