#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gsna::cli {

// Full command-line entry point, callable in-process for tests. args excludes
// the program name. Returns the process exit code: 0 ok, 2 validation error,
// 1 runtime error, 64 unknown subcommand.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace gsna::cli
