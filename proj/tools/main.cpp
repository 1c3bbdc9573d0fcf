#include "dualest/cli.hpp"

int main(int argc, char** argv) { return dualest::cli::run(argc, argv); }
