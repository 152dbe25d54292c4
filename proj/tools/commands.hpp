#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "experiment_config.hpp"

namespace gpscat::cli {

struct RunContext {
  ExperimentConfig config;
  std::filesystem::path out_dir;
  bool snapshots = false;
  std::ostream* log = nullptr;  ///< human-readable progress; not part of the archived outputs
};

/// Subcommand names in help order.
const std::vector<std::string>& command_names();

/// Runs one subcommand and writes its outputs under ctx.out_dir, plus the
/// effective config as config.json. Returns 0, or 1 on a tolerance breach.
/// Library errors propagate; map them with exit_code_for.
int run_command(const std::string& name, RunContext& ctx);

/// 1 for SmallnessViolated and BlowupGuard, 2 for invalid input
/// (InvalidArgument, ConfigError, GuardViolation, SingularZeroMode...).
int exit_code_for(const std::exception& error);

}  // namespace gpscat::cli
