#pragma once

#include <iosfwd>

namespace trailmap::tools {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitIoOrUsage = 2;

// Entry point of the `trailmap` binary. Subcommands: validate, heatmap,
// transitions, correlate, generate, serve.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace trailmap::tools
