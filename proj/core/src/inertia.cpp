#include "l2approx/inertia.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "l2approx/errors.hpp"

namespace l2approx {

InertiaCounter::InertiaCounter(const SparseIntMatrix& symmetric)
    : n_(symmetric.rows()), w_(symmetric.bandwidth()), scale_(1.0) {
  if (symmetric.rows() != symmetric.cols()) throw DimensionMismatch("inertia of a non-square matrix");
  band_.assign(n_ * (w_ + 1), 0.0);
  for (const auto& [r, c, v] : symmetric.triplets()) {
    if (c > r) continue;
    band_[r * (w_ + 1) + (c + w_ - r)] = static_cast<double>(v);
  }
  scale_ = std::max<double>(1.0, static_cast<double>(symmetric.max_abs_row_sum()));
}

InertiaCounter::Probe InertiaCounter::probe(double sigma) const {
  const std::size_t stride = w_ + 1;
  // Row i of L stored like band_: l[i * stride + (j - i + w_)] = L(i, j).
  std::vector<double> l(band_.size(), 0.0);
  std::vector<double> d(n_, 0.0);
  std::vector<double> ld(w_ + 1, 0.0);
  const double tiny = std::numeric_limits<double>::epsilon() * scale_;
  std::size_t negatives = 0;
  double min_pivot = std::numeric_limits<double>::infinity();

  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t lo = i > w_ ? i - w_ : 0;
    double* li = &l[i * stride];
    const double* ai = &band_[i * stride];
    // L(i, j) for lo <= j < i.
    for (std::size_t j = lo; j < i; ++j) {
      const std::size_t jlo = std::max(lo, j > w_ ? j - w_ : 0);
      const double* lj = &l[j * stride];
      double s = ai[j + w_ - i];
      for (std::size_t k = jlo; k < j; ++k) s -= ld[k - lo] * lj[k + w_ - j];
      li[j + w_ - i] = s / d[j];
      ld[j - lo] = s;
    }
    double diag = ai[w_] - sigma;
    for (std::size_t k = lo; k < i; ++k) diag -= ld[k - lo] * li[k + w_ - i];
    // A zero pivot means sigma is (numerically) an eigenvalue; perturbing
    // upward counts it as not below sigma.
    if (std::abs(diag) < tiny) diag = tiny;
    d[i] = diag;
    min_pivot = std::min(min_pivot, std::abs(diag));
    if (diag < 0) ++negatives;
  }
  return {negatives, min_pivot / scale_};
}

}  // namespace l2approx
