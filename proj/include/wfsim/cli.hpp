#pragma once

#include <iosfwd>

namespace wfsim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitSimulation = 1;  // workload or simulation failure
inline constexpr int kExitInput = 2;       // unreadable or malformed input, bad flags

// Entry point of the wfsim tool: subcommands seed, gen, simulate, sweep,
// report. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wfsim::cli
