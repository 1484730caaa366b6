#include "seqlab/cli.hpp"

int main(int argc, char** argv) { return seqlab::cli::run(argc, argv); }
