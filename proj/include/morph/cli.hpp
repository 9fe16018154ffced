#pragma once

#include <string>
#include <vector>

namespace morph::cli {

// Runs one CLI command. Returns 0 on success, 1 on domain errors (with a
// machine-readable {"error":"..."} line on stderr), 2 on usage errors.
int run(const std::vector<std::string>& args);

}  // namespace morph::cli
