#pragma once

#include <cmath>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "l2approx/laurent.hpp"
#include "l2approx/periodic_complex.hpp"
#include "l2approx/sparse_int.hpp"

namespace support {

inline std::filesystem::path fixture_path(const std::string& name) {
  return std::filesystem::path(L2APPROX_FIXTURE_DIR) / name;
}

inline const l2approx::PeriodicComplex& fixture(const std::string& stem) {
  static std::map<std::string, l2approx::PeriodicComplex> cache;
  auto it = cache.find(stem);
  if (it == cache.end()) {
    it = cache.emplace(stem, l2approx::load_complex_file(fixture_path(stem + ".json"))).first;
  }
  return it->second;
}

inline const std::vector<std::string>& fixture_names() {
  static const std::vector<std::string> names{"circle", "wedge", "torus"};
  return names;
}

inline l2approx::Shift random_shift(std::mt19937_64& rng, std::size_t rank, int span) {
  std::uniform_int_distribution<int> coord(-span, span);
  l2approx::Shift s(rank);
  for (std::size_t k = 0; k < rank; ++k) s[k] = coord(rng);
  return s;
}

inline l2approx::LaurentPoly random_poly(std::mt19937_64& rng, std::size_t rank, int terms = 3, int span = 2) {
  std::uniform_int_distribution<int> coeff(-3, 3);
  l2approx::LaurentPoly p(rank);
  for (int i = 0; i < terms; ++i) p.add_term(random_shift(rng, rank, span), coeff(rng));
  return p;
}

inline l2approx::LaurentMatrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
                                             std::size_t rank) {
  std::bernoulli_distribution keep(0.6);
  l2approx::LaurentMatrix m(rows, cols, rank);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (keep(rng)) m.set(r, c, random_poly(rng, rank));
    }
  }
  return m;
}

/// Dense one-variable polynomial product by explicit convolution of
/// coefficient arrays, offset so index 0 stands for t^-offset.
inline std::map<long, mpz_class> convolve(const std::map<long, mpz_class>& a, const std::map<long, mpz_class>& b) {
  std::map<long, mpz_class> out;
  for (const auto& [i, x] : a) {
    for (const auto& [j, y] : b) out[i + j] += x * y;
  }
  for (auto it = out.begin(); it != out.end();) it = it->second == 0 ? out.erase(it) : std::next(it);
  return out;
}

/// Division-free characteristic polynomial (Berkowitz), det(tI - A),
/// coefficients in ascending order.
inline std::vector<mpz_class> berkowitz(const std::vector<std::vector<mpz_class>>& a) {
  const std::size_t n = a.size();
  if (n == 0) return {1};
  std::vector<mpz_class> v{1, -a[0][0]};
  for (std::size_t r = 1; r < n; ++r) {
    // column of the Toeplitz factor: 1, -a_rr, -R C, -R M C, ..., -R M^{r-1} C
    std::vector<mpz_class> col{1, -a[r][r]};
    std::vector<mpz_class> x(r);
    for (std::size_t i = 0; i < r; ++i) x[i] = a[i][r];
    for (std::size_t p = 0; p < r; ++p) {
      mpz_class dot = 0;
      for (std::size_t i = 0; i < r; ++i) dot += a[r][i] * x[i];
      col.push_back(-dot);
      std::vector<mpz_class> next(r, 0);
      for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t k = 0; k < r; ++k) next[i] += a[i][k] * x[k];
      }
      x = std::move(next);
    }
    std::vector<mpz_class> w(r + 2, 0);
    for (std::size_t i = 0; i < r + 2; ++i) {
      for (std::size_t k = 0; k <= i && k < v.size(); ++k) w[i] += col[i - k] * v[k];
    }
    v = std::move(w);
  }
  return {v.rbegin(), v.rend()};
}

inline std::vector<std::vector<mpz_class>> to_mpz(const l2approx::SparseIntMatrix& m) {
  std::vector<std::vector<mpz_class>> out(m.rows(), std::vector<mpz_class>(m.cols(), 0));
  for (const auto& [r, c, v] : m.triplets()) out[r][c] = static_cast<long>(v);
  return out;
}

inline l2approx::SparseIntMatrix random_symmetric(std::mt19937_64& rng, std::size_t n, int magnitude, double fill) {
  std::uniform_int_distribution<int> value(-magnitude, magnitude);
  std::bernoulli_distribution keep(fill);
  std::vector<l2approx::SparseIntMatrix::Triplet> t;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      if (!keep(rng)) continue;
      const int v = value(rng);
      t.emplace_back(i, j, v);
      if (i != j) t.emplace_back(j, i, v);
    }
  }
  return l2approx::SparseIntMatrix::from_triplets(n, n, std::move(t));
}

/// Path-graph Laplacian eigenvalues 4 sin^2(k pi / (2 n)), k = 0..n-1.
inline std::vector<double> path_eigenvalues(std::size_t vertices) {
  std::vector<double> ev;
  for (std::size_t k = 0; k < vertices; ++k) {
    const double s = std::sin(static_cast<double>(k) * M_PI / (2.0 * static_cast<double>(vertices)));
    ev.push_back(4.0 * s * s);
  }
  return ev;
}

}  // namespace support
