#include "chp/cli.hpp"

int main(int argc, char** argv) { return chp::cli::run(argc, argv); }
