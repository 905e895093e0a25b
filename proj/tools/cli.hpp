#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dfcal::cli {

/// Runs one command line. Returns 0 on success, 1 on validation errors and 2
/// on numeric failures; diagnostics go to `err` as a single line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dfcal::cli
