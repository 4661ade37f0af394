#include "l2approx/sparse_int.hpp"

#include <algorithm>
#include <map>
#include <ostream>

#include "l2approx/errors.hpp"

namespace l2approx {

namespace {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_add_overflow(a, b, &out)) throw Error("integer overflow in sparse matrix sum");
  return out;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_mul_overflow(a, b, &out)) throw Error("integer overflow in sparse matrix product");
  return out;
}

}  // namespace

SparseIntMatrix::SparseIntMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

SparseIntMatrix SparseIntMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                               std::vector<Triplet> triplets) {
  for (const auto& [r, c, v] : triplets) {
    if (r >= rows || c >= cols) throw DimensionMismatch("triplet outside matrix bounds");
  }
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
  });
  SparseIntMatrix m(rows, cols);
  std::size_t i = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    while (i < triplets.size() && std::get<0>(triplets[i]) == r) {
      const std::size_t c = std::get<1>(triplets[i]);
      std::int64_t v = 0;
      while (i < triplets.size() && std::get<0>(triplets[i]) == r && std::get<1>(triplets[i]) == c) {
        v = checked_add(v, std::get<2>(triplets[i]));
        ++i;
      }
      if (v != 0) {
        m.col_idx_.push_back(c);
        m.values_.push_back(v);
      }
    }
    m.row_ptr_[r + 1] = m.values_.size();
  }
  return m;
}

SparseIntMatrix SparseIntMatrix::identity(std::size_t n) {
  std::vector<Triplet> t;
  t.reserve(n);
  for (std::size_t i = 0; i < n; ++i) t.emplace_back(i, i, 1);
  return from_triplets(n, n, std::move(t));
}

std::span<const std::size_t> SparseIntMatrix::row_cols(std::size_t r) const {
  return std::span<const std::size_t>(col_idx_).subspan(row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]);
}

std::span<const std::int64_t> SparseIntMatrix::row_values(std::size_t r) const {
  return std::span<const std::int64_t>(values_).subspan(row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]);
}

std::int64_t SparseIntMatrix::at(std::size_t r, std::size_t c) const {
  const auto cols = row_cols(r);
  auto it = std::lower_bound(cols.begin(), cols.end(), c);
  if (it == cols.end() || *it != c) return 0;
  return row_values(r)[static_cast<std::size_t>(it - cols.begin())];
}

SparseIntMatrix SparseIntMatrix::transpose() const {
  SparseIntMatrix t(cols_, rows_);
  std::vector<std::size_t> count(cols_ + 1, 0);
  for (std::size_t c : col_idx_) ++count[c + 1];
  for (std::size_t c = 0; c < cols_; ++c) count[c + 1] += count[c];
  t.row_ptr_ = count;
  t.col_idx_.resize(values_.size());
  t.values_.resize(values_.size());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const std::size_t pos = count[col_idx_[k]]++;
      t.col_idx_[pos] = r;
      t.values_[pos] = values_[k];
    }
  }
  return t;
}

SparseIntMatrix SparseIntMatrix::submatrix(std::span<const std::size_t> rows,
                                           std::span<const std::size_t> cols) const {
  std::vector<std::size_t> col_map(cols_, cols_);
  for (std::size_t k = 0; k < cols.size(); ++k) col_map.at(cols[k]) = k;
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::size_t r = rows[i];
    const auto rc = row_cols(r);
    const auto rv = row_values(r);
    for (std::size_t k = 0; k < rc.size(); ++k) {
      if (col_map[rc[k]] != cols_) t.emplace_back(i, col_map[rc[k]], rv[k]);
    }
  }
  return from_triplets(rows.size(), cols.size(), std::move(t));
}

bool SparseIntMatrix::is_symmetric() const {
  return rows_ == cols_ && transpose() == *this;
}

std::int64_t SparseIntMatrix::trace() const {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) s = checked_add(s, at(i, i));
  return s;
}

std::size_t SparseIntMatrix::bandwidth() const {
  std::size_t w = 0;
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c : row_cols(r)) w = std::max(w, r > c ? r - c : c - r);
  }
  return w;
}

std::int64_t SparseIntMatrix::max_abs_row_sum() const {
  std::int64_t best = 0;
  for (std::size_t r = 0; r < rows_; ++r) {
    std::int64_t s = 0;
    for (std::int64_t v : row_values(r)) s = checked_add(s, v < 0 ? -v : v);
    best = std::max(best, s);
  }
  return best;
}

Eigen::MatrixXd SparseIntMatrix::to_dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows_),
                                            static_cast<Eigen::Index>(cols_));
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      d(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col_idx_[k])) =
          static_cast<double>(values_[k]);
    }
  }
  return d;
}

std::vector<SparseIntMatrix::Triplet> SparseIntMatrix::triplets() const {
  std::vector<Triplet> out;
  out.reserve(values_.size());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      out.emplace_back(r, col_idx_[k], values_[k]);
    }
  }
  return out;
}

SparseIntMatrix operator*(const SparseIntMatrix& a, const SparseIntMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch("sparse product shape mismatch");
  std::vector<SparseIntMatrix::Triplet> t;
  std::vector<std::int64_t> acc(b.cols(), 0);
  std::vector<bool> used(b.cols(), false);
  std::vector<std::size_t> touched;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    touched.clear();
    const auto ac = a.row_cols(r);
    const auto av = a.row_values(r);
    for (std::size_t k = 0; k < ac.size(); ++k) {
      const auto bc = b.row_cols(ac[k]);
      const auto bv = b.row_values(ac[k]);
      for (std::size_t l = 0; l < bc.size(); ++l) {
        if (!used[bc[l]]) {
          used[bc[l]] = true;
          touched.push_back(bc[l]);
        }
        acc[bc[l]] = checked_add(acc[bc[l]], checked_mul(av[k], bv[l]));
      }
    }
    std::sort(touched.begin(), touched.end());
    for (std::size_t c : touched) {
      if (acc[c] != 0) t.emplace_back(r, c, acc[c]);
      acc[c] = 0;
      used[c] = false;
    }
  }
  return SparseIntMatrix::from_triplets(a.rows(), b.cols(), std::move(t));
}

SparseIntMatrix operator+(const SparseIntMatrix& a, const SparseIntMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionMismatch("sparse sum shape mismatch");
  }
  auto t = a.triplets();
  auto tb = b.triplets();
  t.insert(t.end(), tb.begin(), tb.end());
  return SparseIntMatrix::from_triplets(a.rows(), a.cols(), std::move(t));
}

void write_triples(std::ostream& out, const SparseIntMatrix& m) {
  out << m.rows() << ' ' << m.cols() << ' ' << m.nonzeros() << '\n';
  for (const auto& [r, c, v] : m.triplets()) out << r << ' ' << c << ' ' << v << '\n';
}

}  // namespace l2approx
