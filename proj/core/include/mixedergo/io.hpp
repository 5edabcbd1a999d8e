#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mixedergo/model.hpp"

namespace mixedergo {

/// Headerless comma-separated numeric matrix. Blank lines are skipped; every
/// row must have the same number of fields. Errc::io_error if the file cannot
/// be read, Errc::parse_error on malformed content.
Matrix read_csv_matrix(const std::filesystem::path& path);

/// Single column (or single row) CSV as a vector.
Vector read_csv_vector(const std::filesystem::path& path);

/// Formats with 17 significant digits so values round-trip exactly.
std::string format_csv(const Matrix& m);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Reads a whole file; Errc::io_error on failure.
std::string read_file(const std::filesystem::path& path);

/// Manifest {"y": path, "x": path, "z_blocks": [path, ...]}; relative paths
/// resolve against the manifest's directory.
GlmmDesign load_design_manifest(const std::filesystem::path& manifest);

/// Writes y.csv, x.csv, z1.csv, ... plus design.json into `dir`.
std::filesystem::path save_design(const GlmmDesign& design, const std::filesystem::path& dir);

/// {"a_e": number, "b_e": number, "a": [...], "b": [...]}, all keys required.
PriorSpec load_prior(const std::filesystem::path& path);
void save_prior(const PriorSpec& prior, const std::filesystem::path& path);

}  // namespace mixedergo
