#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mwlab/body.hpp"

namespace mwlab {

/// Exit codes of the command-line front end.
enum ExitCode { kExitOk = 0, kExitValidation = 2, kExitSolver = 3, kExitUsage = 64 };

/// Runs one subcommand; args exclude the program name.
int run(const std::vector<std::string>& args);
int run(int argc, const char* const* argv);

using LabeledBody = std::pair<std::string, ConvexBody>;
/// Deterministic SVG, one panel per body on a shared scale (d = 2 only).
std::string render_svg(const std::vector<LabeledBody>& bodies);
void emit_svg(const std::vector<LabeledBody>& bodies, const std::string& path);

}  // namespace mwlab
