/// @file sparse.hpp
/// @brief Compressed-row sparse matrices and the small algebra the schemes
/// need to compose their operators (products, sums, transposes, blocks).

#pragma once

#include <span>
#include <vector>

namespace vpsim {

struct Triplet {
  int row;
  int col;
  double value;
};

/// CSR matrix. Column indices are strictly increasing within each row.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(int rows, int cols, std::vector<int> row_ptr, std::vector<int> col_idx,
               std::vector<double> values);

  /// Duplicate (row, col) entries are summed; exact zeros left after
  /// summation are dropped. Out-of-range indices throw std::out_of_range.
  static SparseMatrix from_triplets(int rows, int cols, std::span<const Triplet> entries);
  static SparseMatrix identity(int n, double scale = 1.0);
  static SparseMatrix diagonal(std::span<const double> d);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int nnz() const { return static_cast<int>(values_.size()); }

  const std::vector<int>& row_ptr() const { return row_ptr_; }
  const std::vector<int>& col_idx() const { return col_idx_; }
  const std::vector<double>& values() const { return values_; }

  /// y = A x.
  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> operator*(std::span<const double> x) const;

  /// Entry lookup by binary search (0 for structural zeros).
  double at(int r, int c) const;
  std::vector<double> diagonal_entries() const;

  SparseMatrix transpose() const;
  void append_triplets(std::vector<Triplet>& out, int row_offset, int col_offset,
                       double scale = 1.0) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> col_idx_;
  std::vector<double> values_;
};

/// Square convenience form of SparseMatrix::from_triplets.
SparseMatrix assemble_from_triplets(int n, std::span<const Triplet> entries);

SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b);
/// alpha*A + beta*B.
SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double alpha = 1.0, double beta = 1.0);
/// diag(d) * A.
SparseMatrix scale_rows(std::span<const double> d, const SparseMatrix& a);
/// A * diag(d).
SparseMatrix scale_cols(const SparseMatrix& a, std::span<const double> d);
SparseMatrix scaled(const SparseMatrix& a, double s);

/// Assembles a block matrix from (block_row, block_col, matrix, scale)
/// placements; blocks in one block row must share a row count and blocks in
/// one block column a column count.
class BlockAssembler {
 public:
  BlockAssembler(std::vector<int> row_sizes, std::vector<int> col_sizes);
  void place(int block_row, int block_col, const SparseMatrix& m, double scale = 1.0);
  SparseMatrix build() const;

 private:
  std::vector<int> row_sizes_, col_sizes_;
  std::vector<int> row_off_, col_off_;
  std::vector<Triplet> entries_;
};

}  // namespace vpsim
