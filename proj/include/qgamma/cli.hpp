#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace qgamma::cli {

/// Exit codes: 0 success, 1 at least one verification failed, 2 usage or
/// domain error (nothing is computed after a usage error).
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Runs one subcommand. args excludes the program name.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qgamma::cli
