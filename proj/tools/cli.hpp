#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace tsm::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kSolver = 2 };

// Runs one command line (args[0] is the program name). Output that would go
// to stdout/stderr goes to out/err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// 64-bit FNV-1a, hex encoded; used for output hashes in manifests.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace tsm::cli
