#pragma once

// CSV and JSON writers for run records, field snapshots and mode tables.
// Numbers are printed with 17 significant digits so output round-trips.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "lfdd/dynamics.hpp"
#include "lfdd/spectral.hpp"

namespace lfdd {

std::string format_double(double x);

void write_record_csv(const std::filesystem::path& path, const SimRecord& record);
nlohmann::json record_json(const SimRecord& record);

// One row per node: x, eps11..eps12 (packed order), v1..v3, omega23,
// omega13, omega12, V_norm.
void write_snapshot_csv(const std::filesystem::path& path, const FieldState& state, const Grid1D& grid,
                        const Material& material);
nlohmann::json snapshot_json(const FieldState& state, const Grid1D& grid, const Material& material);

// p (1-based), frequency, residual, label
void write_modes_csv(const std::filesystem::path& path, const ModeSet& modes);
nlohmann::json modes_json(const ModeSet& modes);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace lfdd
