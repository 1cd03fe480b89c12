#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace narrowflux::cli {

inline constexpr const char* kVersion = "1.0.0";

/// Runs the command line `args` (program name first). Tables go to `out`,
/// diagnostics to `err`. Returns the process exit code: 0 on success, 1 for
/// configuration errors, 2 for numerical failures, 3 for I/O errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace narrowflux::cli
