#pragma once

#include <filesystem>
#include <iosfwd>

#include "kexp/sparse.hpp"

namespace kexp {

/// Reads a Matrix Market coordinate file. Field may be real, integer or
/// complex; symmetry general, symmetric, hermitian or skew-symmetric.
/// Hermitian files yield a SparseOperator flagged Structure::hermitian.
SparseOperator read_matrix_market(std::istream& in);
SparseOperator read_matrix_market(const std::filesystem::path& path);

/// Writes `complex hermitian` (lower triangle) for hermitian operators and
/// `complex general` otherwise. Values use 17 significant digits, so
/// write(read(write(A))) is byte-identical to write(A).
void write_matrix_market(std::ostream& out, const SparseOperator& a);
void write_matrix_market(const std::filesystem::path& path, const SparseOperator& a);

}  // namespace kexp
