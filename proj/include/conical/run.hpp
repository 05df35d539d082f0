#ifndef CONICAL_RUN_HPP
#define CONICAL_RUN_HPP

#include "conical/config.hpp"

namespace conical {

// Exit codes shared by the CLI: 0 ok, 2 config error, 3 numerical failure,
// 4 acceptance-criterion failure in check mode.
enum ExitCode : int {
    kOk = 0,
    kConfigError = 2,
    kNumericalError = 3,
    kCheckFailed = 4,
};

// Executes one subcommand (trajectory | evolve | wigner | egorov-check |
// two-microlocal), writing artifacts under cfg.out_dir. Returns the exit
// code; failures are also serialized into the manifest.
int run_subcommand(const RunConfig& cfg, const std::string& subcommand);

}  // namespace conical

#endif
