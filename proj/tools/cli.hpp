#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace risgame::cli {

enum ExitCode { kOk = 0, kCheckFailed = 1, kBadArguments = 2 };

/// Entry point of the `risgame` tool; args exclude the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace risgame::cli
