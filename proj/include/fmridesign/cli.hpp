#pragma once

// Command-line front end. Subcommands: construct, evaluate, certify, search,
// simulate, efficiency, blocks, tabulated. Reports are JSON with sorted keys and
// "schema": 1.

#include <iosfwd>
#include <string>
#include <vector>

namespace fmridesign::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitResourceCap = 3;

// args excludes the program name. Reports go to `out`; errors go to `err`
// as a one-line JSON object {"error": kind, "message": text}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fmridesign::cli
