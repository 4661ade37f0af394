#pragma once

// Integer group ring of Z^d: finitely supported Laurent polynomials with
// integer coefficients, and sparse matrices over them.

#include <array>
#include <complex>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <utility>

#include <Eigen/Dense>
#include <gmpxx.h>

#include "l2approx/errors.hpp"

namespace l2approx {

inline constexpr std::size_t kMaxDeckRank = 6;

/// Element of Z^d, the deck group. Stored as a fixed-length tuple so that
/// polynomial supports iterate in lexicographic order.
class Shift {
 public:
  Shift() = default;
  explicit Shift(std::size_t rank);
  Shift(std::initializer_list<std::int64_t> coords);

  static Shift from_span(std::span<const std::int64_t> coords);
  static Shift unit(std::size_t rank, std::size_t axis);

  std::size_t rank() const { return rank_; }
  std::int64_t operator[](std::size_t i) const { return coords_[i]; }
  std::int64_t& operator[](std::size_t i) { return coords_[i]; }

  Shift operator+(const Shift& other) const;
  Shift operator-(const Shift& other) const;
  Shift operator-() const;

  bool is_zero() const;
  std::int64_t l1_norm() const;
  std::int64_t linf_norm() const;

  // Coordinates past rank() are always zero, so the defaulted ordering is
  // lexicographic on the first rank() coordinates.
  auto operator<=>(const Shift&) const = default;
  bool operator==(const Shift&) const = default;

  std::string to_string() const;

 private:
  std::array<std::int64_t, kMaxDeckRank> coords_{};
  std::uint8_t rank_ = 0;
};

/// sum_g c_g t^g with c_g in Z, g in Z^d. No stored coefficient is zero.
class LaurentPoly {
 public:
  using Terms = std::map<Shift, mpz_class>;

  explicit LaurentPoly(std::size_t rank = 1);

  static LaurentPoly constant(std::size_t rank, const mpz_class& c);
  static LaurentPoly monomial(const Shift& shift, const mpz_class& c);

  std::size_t rank() const { return rank_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  mpz_class coefficient(const Shift& shift) const;
  mpz_class constant_term() const { return coefficient(Shift(rank_)); }

  /// Adds c t^shift, dropping the term if it cancels.
  void add_term(const Shift& shift, const mpz_class& c);

  LaurentPoly& operator+=(const LaurentPoly& other);
  LaurentPoly& operator-=(const LaurentPoly& other);
  LaurentPoly operator+(const LaurentPoly& other) const;
  LaurentPoly operator-(const LaurentPoly& other) const;
  LaurentPoly operator*(const LaurentPoly& other) const;
  LaurentPoly operator-() const;
  bool operator==(const LaurentPoly& other) const;

  /// Group-ring involution: the coefficient at g moves to -g.
  LaurentPoly involution() const;

  /// Substitutes t_k -> exp(2 pi i theta_k).
  std::complex<double> evaluate(std::span<const double> theta) const;

  mpz_class abs_coefficient_sum() const;
  mpz_class max_abs_coefficient() const;
  std::int64_t max_shift_linf() const;

  std::string to_string() const;

 private:
  Terms terms_;
  std::size_t rank_;
};

/// rows x cols matrix with entries in Z[Z^d]. Only nonzero entries are stored.
class LaurentMatrix {
 public:
  using Index = std::pair<std::size_t, std::size_t>;
  using Entries = std::map<Index, LaurentPoly>;

  LaurentMatrix(std::size_t rows, std::size_t cols, std::size_t rank);

  static LaurentMatrix identity(std::size_t n, std::size_t rank);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t rank() const { return rank_; }
  bool is_square() const { return rows_ == cols_; }
  const Entries& entries() const { return entries_; }

  /// Entry (r, c); the zero polynomial when absent.
  LaurentPoly at(std::size_t r, std::size_t c) const;
  void set(std::size_t r, std::size_t c, LaurentPoly value);
  void add_to(std::size_t r, std::size_t c, const LaurentPoly& value);

  LaurentMatrix operator+(const LaurentMatrix& other) const;
  bool operator==(const LaurentMatrix& other) const;

  bool is_zero() const { return entries_.empty(); }
  std::int64_t max_shift_linf() const;

  std::string to_string() const;

 private:
  void check_index(std::size_t r, std::size_t c) const;

  Entries entries_;
  std::size_t rows_;
  std::size_t cols_;
  std::size_t rank_;
};

/// Exact product in the group ring. Throws DimensionMismatch.
LaurentMatrix multiply(const LaurentMatrix& a, const LaurentMatrix& b);

/// Transpose with every entry replaced by its involution.
LaurentMatrix adjoint(const LaurentMatrix& a);

/// Fourier symbol of the Z^d-periodic operator at theta in [0,1)^d.
Eigen::MatrixXcd evaluate(const LaurentMatrix& a, std::span<const double> theta);

/// sum_i of the coefficient at 0 of (A^k)_{ii}: the von Neumann trace of A^k.
mpz_class vn_trace_power(const LaurentMatrix& a, unsigned k);

/// Exact integer matrix power, A^0 = identity.
LaurentMatrix power(const LaurentMatrix& a, unsigned k);

}  // namespace l2approx
