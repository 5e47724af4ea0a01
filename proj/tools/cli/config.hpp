#pragma once

#include "ellipsoid_lab/experiment.hpp"

#include <set>
#include <string>

namespace ellipsoid_lab::cli {

/// Keys accepted in a phase config file. Anything else is a UsageError.
const std::set<std::string>& config_keys();

/// Parses a flat JSON object into `cfg`, recording every key that was set
/// in `seen`. Throws UsageError on unknown keys or wrong value types and
/// IoError when the file cannot be read or is not JSON.
void load_config_file(const std::string& path, ExperimentConfig& cfg, std::set<std::string>& seen,
                      int& verbosity);

/// Same as load_config_file but from an in-memory document.
void load_config_text(const std::string& text, ExperimentConfig& cfg, std::set<std::string>& seen, int& verbosity);

}  // namespace ellipsoid_lab::cli
