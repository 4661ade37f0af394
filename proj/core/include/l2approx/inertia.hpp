#pragma once

#include <cstddef>
#include <vector>

#include "l2approx/sparse_int.hpp"

namespace l2approx {

/// Eigenvalue counts of a symmetric banded matrix without a full spectrum:
/// the number of negative pivots of an LDL^T factorisation of A - sigma I
/// equals the number of eigenvalues below sigma (Sylvester's law of inertia).
class InertiaCounter {
 public:
  explicit InertiaCounter(const SparseIntMatrix& symmetric);

  std::size_t dimension() const { return n_; }
  std::size_t bandwidth() const { return w_; }

  struct Probe {
    std::size_t below = 0;     ///< #{eigenvalues < sigma}
    double min_pivot = 0.0;    ///< smallest |d_i|, relative to the row-sum scale
  };

  Probe probe(double sigma) const;

  /// #{eigenvalues < sigma}.
  std::size_t count_below(double sigma) const { return probe(sigma).below; }

 private:
  std::size_t n_;
  std::size_t w_;
  double scale_;
  // Lower band, row-major: band_[i * (w_ + 1) + (j - i + w_)] = A(i, j), i - w_ <= j <= i.
  std::vector<double> band_;
};

}  // namespace l2approx
