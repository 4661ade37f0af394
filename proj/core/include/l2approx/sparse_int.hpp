#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

namespace l2approx {

/// Compressed-row integer matrix. Column indices within a row are sorted and
/// no stored value is zero. Arithmetic throws on 64-bit overflow.
class SparseIntMatrix {
 public:
  using Triplet = std::tuple<std::size_t, std::size_t, std::int64_t>;

  SparseIntMatrix() : row_ptr_(1, 0) {}
  SparseIntMatrix(std::size_t rows, std::size_t cols);
  /// Duplicate triplets are summed.
  static SparseIntMatrix from_triplets(std::size_t rows, std::size_t cols,
                                       std::vector<Triplet> triplets);
  static SparseIntMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nonzeros() const { return values_.size(); }

  std::span<const std::size_t> row_cols(std::size_t r) const;
  std::span<const std::int64_t> row_values(std::size_t r) const;
  std::int64_t at(std::size_t r, std::size_t c) const;

  SparseIntMatrix transpose() const;
  /// Keeps the listed rows and columns, in the given order.
  SparseIntMatrix submatrix(std::span<const std::size_t> rows, std::span<const std::size_t> cols) const;

  bool is_symmetric() const;
  std::int64_t trace() const;
  /// max_i |i - j| over stored entries.
  std::size_t bandwidth() const;
  std::int64_t max_abs_row_sum() const;

  Eigen::MatrixXd to_dense() const;
  std::vector<Triplet> triplets() const;

  bool operator==(const SparseIntMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::size_t> col_idx_;
  std::vector<std::int64_t> values_;
};

SparseIntMatrix operator*(const SparseIntMatrix& a, const SparseIntMatrix& b);
SparseIntMatrix operator+(const SparseIntMatrix& a, const SparseIntMatrix& b);

/// Plain-text "row col value" lines in row-major order, preceded by a
/// "rows cols nonzeros" header line.
void write_triples(std::ostream& out, const SparseIntMatrix& m);

}  // namespace l2approx
