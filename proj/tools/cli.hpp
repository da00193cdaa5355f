#pragma once

// The oracle-forge command line, callable in-process.

#include <iosfwd>
#include <string>
#include <vector>

namespace oracleforge::cli {

// args excludes the program name. "-" as an input or output path means the
// given stream. Returns the process exit code: 0 on success, 1 on a fatal
// error, 2 on a usage or configuration error.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

} // namespace oracleforge::cli
