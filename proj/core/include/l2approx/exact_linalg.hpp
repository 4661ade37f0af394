#pragma once

// Exact integer linear algebra for the finite Laplacians: rank over Q and
// characteristic polynomials with integer coefficients.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <gmpxx.h>

#include "l2approx/sparse_int.hpp"

namespace l2approx {

/// Largest dimension eliminated in rational arithmetic by exact_rank.
inline constexpr std::size_t kRationalRankLimit = 600;

/// Rank over Q by sparse Gaussian elimination in exact rational arithmetic.
/// Pivots follow a greedy Markowitz rule (shortest row, then sparsest
/// column), which is minimum degree on symmetric positive semidefinite input.
std::size_t rational_rank(const SparseIntMatrix& a);

/// Rank over Z/p for an odd prime p < 2^62, same pivoting.
std::size_t rank_mod(const SparseIntMatrix& a, std::uint64_t p);

/// rational_rank up to kRationalRankLimit; beyond it the larger of the ranks
/// modulo the two largest primes below 2^62. A rank mod p never exceeds the
/// rank over Q, and falls short only if p divides every maximal nonzero minor.
std::size_t exact_rank(const SparseIntMatrix& a);

/// det(t I - A) as coefficients c_0..c_n (c_n = 1). Computed modulo enough
/// 62-bit primes to exceed twice an a priori coefficient bound, then lifted
/// by Chinese remaindering; the result is exact.
std::vector<mpz_class> characteristic_polynomial(const SparseIntMatrix& a);

/// log2 of the coefficient bound used by characteristic_polynomial:
/// prod_i (1 + ||column_i||_2).
double charpoly_coefficient_bound_log2(const SparseIntMatrix& a);

namespace modular {

__extension__ using u128 = unsigned __int128;

/// Montgomery arithmetic modulo an odd p < 2^62.
class Montgomery {
 public:
  explicit Montgomery(std::uint64_t p);

  std::uint64_t modulus() const { return p_; }
  std::uint64_t to(std::uint64_t x) const { return mul(x % p_, r2_); }
  std::uint64_t from(std::uint64_t x) const { return reduce(x); }
  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const {
    return reduce(static_cast<u128>(a) * b);
  }
  std::uint64_t add(std::uint64_t a, std::uint64_t b) const {
    const std::uint64_t s = a + b;
    return s >= p_ ? s - p_ : s;
  }
  std::uint64_t sub(std::uint64_t a, std::uint64_t b) const { return a >= b ? a - b : a + p_ - b; }
  std::uint64_t one() const { return one_; }
  std::uint64_t pow(std::uint64_t a, std::uint64_t e) const;
  /// Inverse of a nonzero Montgomery-form element.
  std::uint64_t inv(std::uint64_t a) const { return pow(a, p_ - 2); }

 private:
  std::uint64_t reduce(u128 t) const {
    const std::uint64_t m = static_cast<std::uint64_t>(t) * neg_inv_;
    const auto u = static_cast<std::uint64_t>((t + static_cast<u128>(m) * p_) >> 64);
    return u >= p_ ? u - p_ : u;
  }

  std::uint64_t p_;
  std::uint64_t neg_inv_;
  std::uint64_t r2_;
  std::uint64_t one_;
};

/// The k largest primes below 2^62, descending. Deterministic.
std::span<const std::uint64_t> primes(std::size_t k);

/// Characteristic polynomial modulo p (ordinary residues, c_0..c_n), by
/// reduction to Hessenberg form.
std::vector<std::uint64_t> characteristic_polynomial_mod(const SparseIntMatrix& a, std::uint64_t p);

}  // namespace modular

}  // namespace l2approx
