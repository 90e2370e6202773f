#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace envimp::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kIoError = 1;
inline constexpr int kMalformedInput = 2;
inline constexpr int kNumericalFailure = 3;
inline constexpr int kEmptyZeroSet = 4;

/// Each command takes its flags (without the subcommand name) and returns an
/// exit code; diagnostics go to `err`.
int cmd_implicitize(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cmd_study(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cmd_contour(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cmd_bench(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Dispatches on args[0] (the subcommand).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace envimp::cli
