#ifndef HVT_CLI_HPP
#define HVT_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace hvt {

/// Command-line entry point, exposed for tests.
/// Exit codes: 0 success with all checks passing, 1 check failure,
/// 2 usage or validation error.
int cli_run(std::vector<std::string> args, std::ostream& out,
            std::ostream& err);

/// Writes content to path atomically (temp file + rename).
void atomic_write(const std::string& path, const std::string& content);

}  // namespace hvt

#endif
