#include "cli.hpp"

int main(int argc, char **argv) { return polsdf::cli::run(argc, argv); }
