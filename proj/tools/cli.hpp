#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace critlen::cli {

/// Exit statuses besides the ectest verdicts 0 / 1 / 2.
inline constexpr int kExitUsage = 64;
inline constexpr int kExitData = 65;
inline constexpr int kExitInternal = 70;

/// Runs one subcommand (critlen, ectest, sweep, region, curve, oracle).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Same with the arguments after the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace critlen::cli
