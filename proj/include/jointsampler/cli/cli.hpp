#ifndef JOINTSAMPLER_CLI_CLI_HPP_
#define JOINTSAMPLER_CLI_CLI_HPP_

#include <string>
#include <vector>

namespace jointsampler::cli {

// Exit codes: 0 success, 1 runtime failure, 2 usage error.
int run_cli(const std::vector<std::string>& args);

int cli_main(int argc, char** argv);

}  // namespace jointsampler::cli

#endif  // JOINTSAMPLER_CLI_CLI_HPP_
