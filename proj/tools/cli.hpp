#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rotmin::cli {

enum ExitCode : int {
    kOk = 0,
    kCheckFailed = 1,
    kConvergence = 2,
    kUsage = 64,
    kIo = 74,
};

/// Runs one command line (args[0] is the program name). Results go to `out`
/// unless --out is given; diagnostics and error blocks go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses a flat "key = value" file; '#' starts a comment. Throws
/// std::invalid_argument on malformed lines and IoError if unreadable.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path);

}  // namespace rotmin::cli
