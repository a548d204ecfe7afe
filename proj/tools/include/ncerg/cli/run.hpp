#pragma once

#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "ncerg/cli/config.hpp"
#include "ncerg/cli/report.hpp"
#include "ncerg/groups.hpp"

namespace ncerg::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitUsage = 2;

/// Parses "Z", "Zd:<d>", "heisenberg", "cyclic:<m>^<d>" or "locfin".
groups::GroupModel parse_group(const std::string& spec);

/// Runs the experiment and fills the report. Throws std::invalid_argument
/// (and the library's DomainError/StructuralError) on bad input.
Report execute(const ExperimentConfig& config);

/// execute() plus output: CSV to `out` (or <out>/<command>.csv and .json),
/// diagnostics to `err`. Returns the exit code.
int run(const ExperimentConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv into a config, or returns the exit code for --help and
/// usage errors. NCERG_CAP in the environment overrides --cap.
std::variant<ExperimentConfig, int> parse_args(int argc, const char* const* argv, std::ostream& out,
                                               std::ostream& err);

}  // namespace ncerg::cli
