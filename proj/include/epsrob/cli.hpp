#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace epsrob {

inline constexpr const char* kToolVersion = "0.1.0";

/// Exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;

/// Entry point of the `epsrob` tool. Subcommands: decide, evaluate, curve,
/// radii, gadget, sample. Normal output goes to `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Convenience overload; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Shortest decimal form that round-trips to the same double.
std::string format_number(double value);

}  // namespace epsrob
