#pragma once

#include <string>
#include <vector>

namespace csent {

struct ProcessResult {
    int exit_code = -1;       // -1 when killed by a signal
    int term_signal = 0;      // non-zero when killed by a signal
    std::string out;
    std::string err;

    bool ok() const { return term_signal == 0 && exit_code == 0; }
};

// Runs argv[0] with the given arguments (no shell involved), optionally in
// working_dir, and captures both output streams to completion.  Throws
// RepoAccessError if the process cannot be spawned at all; a non-zero exit
// is reported through the result, not an exception, because callers need
// stderr to build a useful message.
ProcessResult run_process(const std::vector<std::string>& argv,
                          const std::string& working_dir = "");

}  // namespace csent
