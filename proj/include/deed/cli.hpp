#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace deed::cli {

enum ExitCode : int {
  kOk = 0,
  kConfig = 2,
  kIo = 3,
  kNonConvergence = 4,
  kInvariant = 5,
};

/// Runs `deed <subcommand> [options]`; args excludes the program name.
/// Subcommands: denoise | inpaint-precond | probe-tensor | selftest.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace deed::cli
