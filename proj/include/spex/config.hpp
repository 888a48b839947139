#pragma once

// Flat `key = value` configuration files with one section per subcommand.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "spex/asymptotics.hpp"

namespace spex {

using Settings = std::map<std::string, std::string>;

/// Keys outside any section, overridden by the keys of `section`.
Settings load_settings(const std::filesystem::path& path, const std::string& section);

std::vector<std::size_t> parse_size_list(const std::string& text);

/// Keys: model, alpha, beta, gamma, n, days, m, replications, grid, layout_seed,
/// seed, mc_panels, max_evals, tol_f, tol_x, restarts, jitter, threads.
/// Unknown keys raise ConfigError.
StudyConfig study_config_from(const Settings& settings);

/// Every resolved study value, in the key vocabulary above.
std::vector<std::pair<std::string, std::string>> describe(const StudyConfig& study);

}  // namespace spex
