#include "l2approx/laurent.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

namespace l2approx {

Shift::Shift(std::size_t rank) : rank_(static_cast<std::uint8_t>(rank)) {
  if (rank > kMaxDeckRank) {
    throw DimensionMismatch("deck rank " + std::to_string(rank) + " exceeds supported maximum " +
                            std::to_string(kMaxDeckRank));
  }
}

Shift::Shift(std::initializer_list<std::int64_t> coords) : Shift(coords.size()) {
  std::copy(coords.begin(), coords.end(), coords_.begin());
}

Shift Shift::from_span(std::span<const std::int64_t> coords) {
  Shift s(coords.size());
  std::copy(coords.begin(), coords.end(), s.coords_.begin());
  return s;
}

Shift Shift::unit(std::size_t rank, std::size_t axis) {
  Shift s(rank);
  s.coords_[axis] = 1;
  return s;
}

Shift Shift::operator+(const Shift& other) const {
  Shift out(*this);
  for (std::size_t i = 0; i < rank_; ++i) out.coords_[i] += other.coords_[i];
  return out;
}

Shift Shift::operator-(const Shift& other) const {
  Shift out(*this);
  for (std::size_t i = 0; i < rank_; ++i) out.coords_[i] -= other.coords_[i];
  return out;
}

Shift Shift::operator-() const {
  Shift out(*this);
  for (std::size_t i = 0; i < rank_; ++i) out.coords_[i] = -out.coords_[i];
  return out;
}

bool Shift::is_zero() const {
  return std::all_of(coords_.begin(), coords_.begin() + rank_, [](auto x) { return x == 0; });
}

std::int64_t Shift::l1_norm() const {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < rank_; ++i) s += std::abs(coords_[i]);
  return s;
}

std::int64_t Shift::linf_norm() const {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < rank_; ++i) s = std::max(s, std::abs(coords_[i]));
  return s;
}

std::string Shift::to_string() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < rank_; ++i) os << (i ? "," : "") << coords_[i];
  os << ']';
  return os.str();
}

// ---------------------------------------------------------------------------

LaurentPoly::LaurentPoly(std::size_t rank) : rank_(rank) {
  if (rank > kMaxDeckRank) {
    throw DimensionMismatch("deck rank exceeds supported maximum");
  }
}

LaurentPoly LaurentPoly::constant(std::size_t rank, const mpz_class& c) {
  LaurentPoly p(rank);
  p.add_term(Shift(rank), c);
  return p;
}

LaurentPoly LaurentPoly::monomial(const Shift& shift, const mpz_class& c) {
  LaurentPoly p(shift.rank());
  p.add_term(shift, c);
  return p;
}

mpz_class LaurentPoly::coefficient(const Shift& shift) const {
  auto it = terms_.find(shift);
  return it == terms_.end() ? mpz_class(0) : it->second;
}

void LaurentPoly::add_term(const Shift& shift, const mpz_class& c) {
  if (shift.rank() != rank_) {
    throw DimensionMismatch("shift " + shift.to_string() + " has rank " +
                            std::to_string(shift.rank()) + ", polynomial has rank " +
                            std::to_string(rank_));
  }
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(shift, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

LaurentPoly& LaurentPoly::operator+=(const LaurentPoly& other) {
  for (const auto& [g, c] : other.terms_) add_term(g, c);
  return *this;
}

LaurentPoly& LaurentPoly::operator-=(const LaurentPoly& other) {
  for (const auto& [g, c] : other.terms_) add_term(g, -c);
  return *this;
}

LaurentPoly LaurentPoly::operator+(const LaurentPoly& other) const {
  LaurentPoly out(*this);
  out += other;
  return out;
}

LaurentPoly LaurentPoly::operator-(const LaurentPoly& other) const {
  LaurentPoly out(*this);
  out -= other;
  return out;
}

LaurentPoly LaurentPoly::operator*(const LaurentPoly& other) const {
  if (other.rank_ != rank_) throw DimensionMismatch("polynomial ranks differ");
  LaurentPoly out(rank_);
  for (const auto& [g, c] : terms_) {
    for (const auto& [h, e] : other.terms_) out.add_term(g + h, c * e);
  }
  return out;
}

LaurentPoly LaurentPoly::operator-() const {
  LaurentPoly out(rank_);
  for (const auto& [g, c] : terms_) out.terms_.emplace(g, -c);
  return out;
}

bool LaurentPoly::operator==(const LaurentPoly& other) const {
  return rank_ == other.rank_ && terms_ == other.terms_;
}

LaurentPoly LaurentPoly::involution() const {
  LaurentPoly out(rank_);
  for (const auto& [g, c] : terms_) out.terms_.emplace(-g, c);
  return out;
}

std::complex<double> LaurentPoly::evaluate(std::span<const double> theta) const {
  if (theta.size() != rank_) throw DimensionMismatch("theta has wrong number of coordinates");
  std::complex<double> sum = 0.0;
  for (const auto& [g, c] : terms_) {
    double phase = 0.0;
    for (std::size_t k = 0; k < rank_; ++k) phase += static_cast<double>(g[k]) * theta[k];
    // Reduce mod 1 before scaling so large shifts keep full accuracy.
    phase -= std::floor(phase);
    const double angle = 2.0 * std::numbers::pi * phase;
    sum += c.get_d() * std::complex<double>(std::cos(angle), std::sin(angle));
  }
  return sum;
}

mpz_class LaurentPoly::abs_coefficient_sum() const {
  mpz_class s = 0;
  for (const auto& [g, c] : terms_) s += abs(c);
  return s;
}

mpz_class LaurentPoly::max_abs_coefficient() const {
  mpz_class s = 0;
  for (const auto& [g, c] : terms_) s = std::max<mpz_class>(s, abs(c));
  return s;
}

std::int64_t LaurentPoly::max_shift_linf() const {
  std::int64_t s = 0;
  for (const auto& [g, c] : terms_) s = std::max(s, g.linf_norm());
  return s;
}

std::string LaurentPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [g, c] : terms_) {
    mpz_class mag = abs(c);
    if (first) {
      if (c < 0) os << '-';
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    first = false;
    const bool unit_shift = g.is_zero();
    if (mag != 1 || unit_shift) os << mag.get_str();
    for (std::size_t k = 0; k < rank_; ++k) {
      if (g[k] == 0) continue;
      os << 't';
      if (rank_ > 1) os << (k + 1);
      if (g[k] != 1) os << '^' << g[k];
    }
  }
  return os.str();
}

// ---------------------------------------------------------------------------

LaurentMatrix::LaurentMatrix(std::size_t rows, std::size_t cols, std::size_t rank)
    : rows_(rows), cols_(cols), rank_(rank) {}

LaurentMatrix LaurentMatrix::identity(std::size_t n, std::size_t rank) {
  LaurentMatrix m(n, n, rank);
  for (std::size_t i = 0; i < n; ++i) m.set(i, i, LaurentPoly::constant(rank, 1));
  return m;
}

void LaurentMatrix::check_index(std::size_t r, std::size_t c) const {
  if (r >= rows_ || c >= cols_) {
    throw DimensionMismatch("index (" + std::to_string(r) + "," + std::to_string(c) +
                            ") outside " + std::to_string(rows_) + "x" + std::to_string(cols_));
  }
}

LaurentPoly LaurentMatrix::at(std::size_t r, std::size_t c) const {
  check_index(r, c);
  auto it = entries_.find({r, c});
  return it == entries_.end() ? LaurentPoly(rank_) : it->second;
}

void LaurentMatrix::set(std::size_t r, std::size_t c, LaurentPoly value) {
  check_index(r, c);
  if (value.rank() != rank_) throw DimensionMismatch("entry rank differs from matrix rank");
  if (value.is_zero()) {
    entries_.erase({r, c});
  } else {
    entries_.insert_or_assign({r, c}, std::move(value));
  }
}

void LaurentMatrix::add_to(std::size_t r, std::size_t c, const LaurentPoly& value) {
  check_index(r, c);
  if (value.rank() != rank_) throw DimensionMismatch("entry rank differs from matrix rank");
  if (value.is_zero()) return;
  auto [it, inserted] = entries_.try_emplace({r, c}, value);
  if (!inserted) {
    it->second += value;
    if (it->second.is_zero()) entries_.erase(it);
  }
}

LaurentMatrix LaurentMatrix::operator+(const LaurentMatrix& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_ || rank_ != other.rank_) {
    throw DimensionMismatch("matrix sum of " + std::to_string(rows_) + "x" + std::to_string(cols_) +
                            " and " + std::to_string(other.rows_) + "x" +
                            std::to_string(other.cols_));
  }
  LaurentMatrix out(*this);
  for (const auto& [ij, p] : other.entries_) out.add_to(ij.first, ij.second, p);
  return out;
}

bool LaurentMatrix::operator==(const LaurentMatrix& other) const {
  return rows_ == other.rows_ && cols_ == other.cols_ && rank_ == other.rank_ &&
         entries_ == other.entries_;
}

std::int64_t LaurentMatrix::max_shift_linf() const {
  std::int64_t s = 0;
  for (const auto& [ij, p] : entries_) s = std::max(s, p.max_shift_linf());
  return s;
}

std::string LaurentMatrix::to_string() const {
  std::ostringstream os;
  for (std::size_t r = 0; r < rows_; ++r) {
    os << '[';
    for (std::size_t c = 0; c < cols_; ++c) os << (c ? ", " : "") << at(r, c).to_string();
    os << "]\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------

LaurentMatrix multiply(const LaurentMatrix& a, const LaurentMatrix& b) {
  if (a.cols() != b.rows() || a.rank() != b.rank()) {
    throw DimensionMismatch("cannot multiply " + std::to_string(a.rows()) + "x" +
                            std::to_string(a.cols()) + " by " + std::to_string(b.rows()) + "x" +
                            std::to_string(b.cols()));
  }
  std::vector<std::vector<std::pair<std::size_t, const LaurentPoly*>>> b_rows(b.rows());
  for (const auto& [ij, p] : b.entries()) b_rows[ij.first].emplace_back(ij.second, &p);

  LaurentMatrix out(a.rows(), b.cols(), a.rank());
  for (const auto& [ij, p] : a.entries()) {
    for (const auto& [col, q] : b_rows[ij.second]) out.add_to(ij.first, col, p * *q);
  }
  return out;
}

LaurentMatrix adjoint(const LaurentMatrix& a) {
  LaurentMatrix out(a.cols(), a.rows(), a.rank());
  for (const auto& [ij, p] : a.entries()) out.set(ij.second, ij.first, p.involution());
  return out;
}

Eigen::MatrixXcd evaluate(const LaurentMatrix& a, std::span<const double> theta) {
  if (theta.size() != a.rank()) throw DimensionMismatch("theta has wrong number of coordinates");
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(a.rows()),
                                                static_cast<Eigen::Index>(a.cols()));
  for (const auto& [ij, p] : a.entries()) {
    out(static_cast<Eigen::Index>(ij.first), static_cast<Eigen::Index>(ij.second)) =
        p.evaluate(theta);
  }
  return out;
}

LaurentMatrix power(const LaurentMatrix& a, unsigned k) {
  if (!a.is_square()) throw DimensionMismatch("power of a non-square matrix");
  LaurentMatrix result = LaurentMatrix::identity(a.rows(), a.rank());
  for (unsigned i = 0; i < k; ++i) result = multiply(result, a);
  return result;
}

mpz_class vn_trace_power(const LaurentMatrix& a, unsigned k) {
  if (!a.is_square()) throw DimensionMismatch("trace of a non-square matrix");
  if (k == 0) return mpz_class(static_cast<unsigned long>(a.rows()));
  // Only the diagonal constant terms of A^k are needed: combine A^{k/2} with
  // A^{k - k/2} instead of forming the full power.
  const LaurentMatrix left = power(a, k / 2);
  const LaurentMatrix right = power(a, k - k / 2);
  std::vector<std::vector<std::pair<std::size_t, const LaurentPoly*>>> right_cols(right.cols());
  for (const auto& [ij, p] : right.entries()) right_cols[ij.second].emplace_back(ij.first, &p);

  const Shift origin(a.rank());
  mpz_class trace = 0;
  for (const auto& [ij, p] : left.entries()) {
    // (left * right)_{ii} picks left(i,l) right(l,i); constant term of a
    // product is sum_g p_g q_{-g}.
    for (const auto& [row, q] : right_cols[ij.first]) {
      if (row != ij.second) continue;
      for (const auto& [g, c] : p.terms()) trace += c * q->coefficient(-g);
    }
  }
  return trace;
}

}  // namespace l2approx
