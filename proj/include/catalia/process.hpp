#pragma once

#include <string>
#include <vector>

namespace catalia {

struct ProcessResult {
    std::string out;
    std::string err;
    int exit_code = -1;
    bool timed_out = false;
    double seconds = 0;
};

/// Runs `argv` with `input` on stdin, killing it after `timeout_s` seconds (<= 0: no limit).
/// Throws BackendSpawnError if the executable cannot be started.
ProcessResult run_process(const std::vector<std::string>& argv, const std::string& input, double timeout_s);

} // namespace catalia
