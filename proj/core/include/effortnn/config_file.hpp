#pragma once

#include <filesystem>
#include <string_view>

#include <nlohmann/json.hpp>

#include "effortnn/dataset.hpp"

namespace effortnn {

/// Parses the TOML subset used by configuration files: comments, [table]
/// and [dotted.table] headers, bare or quoted keys, and values that are
/// strings, integers, floats, booleans or (possibly multi-line) arrays of
/// those. Throws ConfigError with a line number on anything else.
nlohmann::json parse_toml(std::string_view text);

/// Reads a .toml or .json file into JSON; other extensions are tried as JSON
/// first, then TOML. Throws ConfigError naming the path when it cannot be read.
nlohmann::json load_config_file(const std::filesystem::path& path);

/// Accepts {"columns": {field: column}} or a flat {field: column} object.
ColumnMap column_map_from_json(const nlohmann::json& j);

ColumnMap load_column_map(const std::filesystem::path& path);

}  // namespace effortnn
