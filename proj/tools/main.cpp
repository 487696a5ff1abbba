#include "jointsampler/cli/cli.hpp"

int main(int argc, char** argv) { return jointsampler::cli::cli_main(argc, argv); }
