#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace grg {

/// Exit codes of the grg tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;     // usage, config or hypothesis errors
inline constexpr int kExitNumerical = 2;  // numerical or I/O failures

/// Subcommands: sample, experiment, audit, lemma1, report. `args` excludes
/// the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_cli(int argc, char** argv);

}  // namespace grg
