#pragma once

#include <string>

#include "eulsolve/sparse.hpp"

namespace eulsolve {

// Matrix Market coordinate format (general, real). The writer emits entries
// sorted by (row, col) for bit-stable diffs.
SparseMatrix read_matrix_market(const std::string& path);
void write_matrix_market(const std::string& path, const SparseMatrix& m);

// Vectors: Matrix Market array format or plain newline-separated floats,
// auto-detected on read.
std::vector<double> read_vector(const std::string& path);
void write_vector(const std::string& path, std::span<const double> v);

// Dense matrix in Matrix Market array format (column-major on disk).
void write_dense_matrix_market(const std::string& path, int rows, int cols,
                               std::span<const double> row_major);
std::vector<double> read_dense_matrix_market(const std::string& path, int& rows, int& cols);

}  // namespace eulsolve
