#pragma once

#include <optional>
#include <string>

#include "heatsum/scenarios.hpp"

namespace heatsum::cli {

enum class Subcommand { Estimate, Simulate, Validate, Classify };

std::optional<Subcommand> parse_subcommand(const std::string& name);

struct RunOptions {
  std::optional<double> band_limit;  // overrides the config band
  bool quiet = false;
};

// Strict JSON parse of a scenario config; unknown keys are rejected.
// base_dir resolves relative weight-file paths.
validate::ScenarioConfig load_config(const std::string& path);
validate::ScenarioConfig config_from_json_text(const std::string& text,
                                               const std::string& base_dir);

// Default output directory: HEATKERNEL_OUT when set, else ".".
std::string default_out_dir();

// Exit codes: 0 success, 1 validation failure, 2 config error, 3 solver
// error. Output files land in out_dir and are written atomically
// (temp-then-rename).
int run(Subcommand subcommand, const std::string& config_path, const std::string& out_dir,
        const RunOptions& options = {});

}  // namespace heatsum::cli
