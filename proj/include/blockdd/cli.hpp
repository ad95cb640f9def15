#pragma once

#include <string>
#include <vector>

namespace blockdd {

// One command per call: args are the argv tokens after the program name.
// The report is human text by default, a JSON object with --json; all
// randomness flows from --seed (default 0). Timings live under the
// "timings" key so reports compare byte-identically once it is dropped.
struct CliResult {
    int exitCode = 0;
    std::string report;
};

CliResult run_command(const std::vector<std::string>& args);

extern const char* kToolVersion;

}  // namespace blockdd
