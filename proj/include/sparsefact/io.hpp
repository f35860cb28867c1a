#pragma once

#include "sparsefact/types.hpp"

#include <iosfwd>
#include <string>

namespace sparsefact {

// Text matrix format.  First line is a header, either
//   dense R C
//   sparse R C NNZ
// A dense body has R lines of C space-separated decimal values.  A sparse
// body has NNZ lines "row col value" with 0-based indices sorted by
// (row, col), no duplicates and no explicit zeros.  Writers emit 17
// significant digits so values round-trip exactly.  Readers throw
// std::runtime_error on any malformed or truncated input.

struct MatrixFile {
  bool is_sparse = false;
  Matrix dense;     // valid when !is_sparse
  CooMatrix coo;    // valid when is_sparse
};

MatrixFile read_matrix(std::istream& in);
MatrixFile read_matrix_file(const std::string& path);

Matrix as_dense(const MatrixFile& f);

void write_dense(std::ostream& out, const Matrix& m);
void write_sparse(std::ostream& out, const CooMatrix& m);
void write_dense_file(const std::string& path, const Matrix& m);
void write_sparse_file(const std::string& path, const CooMatrix& m);

// 17-significant-digit decimal form used by all writers.
std::string format_value(double v);

}  // namespace sparsefact
