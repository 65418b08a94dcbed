#pragma once

#include <iosfwd>

namespace dlcluster {

/// Entry point of the `dlcluster` tool. Returns the process exit code;
/// diagnostics go to `err`, summaries to `out`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv);

}  // namespace dlcluster
