#pragma once

namespace eea {

/// Command-line entry point. Subcommands: maze, cartpole, predprey,
/// pretrain-models, verify. Returns the process exit code.
int cli_main(int argc, const char* const* argv);

}  // namespace eea
