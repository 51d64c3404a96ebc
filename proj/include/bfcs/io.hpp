#pragma once

#include <filesystem>
#include <string>

#include "bfcs/types.hpp"

namespace bfcs {

// Dense container: 8-byte magic, uint64 rows, uint64 cols (little-endian),
// then float64 entries row-major, little-endian.
void save_matrix_binary(const std::filesystem::path& path, const Matrix& m);
Matrix load_matrix_binary(const std::filesystem::path& path);

// Plain CSV, one row per line, full float64 round-trip precision.
void save_matrix_csv(const std::filesystem::path& path, const Matrix& m);
Matrix load_matrix_csv(const std::filesystem::path& path);

// Sign container: same header layout, entries as int8 in {-1, +1}.
void save_sign_matrix(const std::filesystem::path& path, const Matrix& m);
Matrix load_sign_matrix(const std::filesystem::path& path);

// Binary P5 PGM with per-image linear min-max scaling to 0..255; the scaling
// constants are written to a `<path>.meta` sidecar.
void save_pgm(const std::filesystem::path& path, const Matrix& m);

// Shortest decimal form that round-trips a float64; "inf"/"-inf"/"nan" pass
// through strtod.
std::string format_double(double v);

}  // namespace bfcs
