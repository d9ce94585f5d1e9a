#pragma once

#include <string>

#include "txsc/value.hpp"

namespace txsc::toml {

/// Minimal TOML reader covering the subset the scenario and transform config
/// files use: [tables], [[arrays of tables]] (dotted paths), bare keys,
/// basic "strings", integers, floats, booleans, arrays and inline tables.
/// Returns the document as ordered JSON. Throws ConfigError on malformed
/// input.
Json parse(const std::string& text);

}  // namespace txsc::toml
