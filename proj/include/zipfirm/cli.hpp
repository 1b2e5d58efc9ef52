#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "zipfirm/error.hpp"

namespace zipfirm::cli {

/// Process exit codes.
enum ExitCode : int {
    kOk = 0,
    kIoError = 1,
    kUsageError = 2,
    kDataError = 3,
};

int exit_code_for(ErrorKind kind) noexcept;

/// Run the tool on argv-style arguments (args[0] is the program name).
/// Human-readable summaries go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace zipfirm::cli
