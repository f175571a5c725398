#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "orlicz/fields.hpp"

namespace orlicz {

enum class FieldFormat { Csv, Binary };

nlohmann::json grid_to_json(const Grid& g);
Grid grid_from_json(const nlohmann::json& j);

// Writes <stem>.json (grid metadata) and <stem>.csv or <stem>.bin (node values,
// one row per node, components in columns; binary is little-endian float64).
void write_field(const GridField& u, const std::filesystem::path& stem, FieldFormat fmt = FieldFormat::Csv);
// Reads a field from its JSON header path.
GridField read_field(const std::filesystem::path& header);

}  // namespace orlicz
