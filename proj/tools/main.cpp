#include "cirbridge/cli.hpp"

int main(int argc, char **argv) { return cirb::cli::run(argc, argv); }
