#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace semiconj::cli {

/// Runs the semiconj command line (simulate / conjugate / verify / figdata).
/// Returns 0 on success, 1 when a verify suite fails, 2 on usage or
/// validation errors. Diagnostics go to `err` as single lines.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace semiconj::cli
