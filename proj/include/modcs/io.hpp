#pragma once

// Text formats shared by the experiments and the command-line tool.

#include <filesystem>
#include <string>
#include <string_view>

#include "modcs/numkit.hpp"

namespace modcs::io {

/// 17 significant digits, enough to round-trip any double.
std::string format_real(double v);

/// One row per line, comma-separated, no header.
std::string matrix_to_csv(const DenseMatrix& a);
DenseMatrix matrix_from_csv(std::string_view text);
DenseMatrix read_matrix(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace modcs::io
