#include "l2approx/exact_linalg.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <set>

#include "l2approx/errors.hpp"

namespace l2approx {

namespace {

struct RationalField {
  using Value = mpq_class;
  Value from(std::int64_t v) const { return Value(static_cast<long>(v)); }
  bool is_zero(const Value& v) const { return v == 0; }
  Value ratio(const Value& a, const Value& b) const { return a / b; }
  Value sub_mul(const Value& a, const Value& f, const Value& b) const { return a - f * b; }
  Value neg_mul(const Value& f, const Value& b) const { return -f * b; }
};

struct PrimeField {
  using Value = std::uint64_t;
  modular::Montgomery mont;
  Value from(std::int64_t v) const {
    const std::uint64_t p = mont.modulus();
    const std::uint64_t r = v >= 0 ? static_cast<std::uint64_t>(v) % p
                                   : (p - static_cast<std::uint64_t>(-(v + 1)) % p - 1) % p;
    return mont.to(r);
  }
  bool is_zero(Value v) const { return v == 0; }
  Value ratio(Value a, Value b) const { return mont.mul(a, mont.inv(b)); }
  Value sub_mul(Value a, Value f, Value b) const { return mont.sub(a, mont.mul(f, b)); }
  Value neg_mul(Value f, Value b) const { return mont.sub(0, mont.mul(f, b)); }
};

// Sparse elimination with a greedy Markowitz rule (shortest row, then
// sparsest column; the diagonal wins ties).
template <class Field>
std::size_t markowitz_rank(const SparseIntMatrix& a, const Field& field) {
  using Value = typename Field::Value;
  struct Entry {
    std::size_t col;
    Value value;
  };
  using Row = std::vector<Entry>;

  const std::size_t n_rows = a.rows();
  std::vector<Row> rows(n_rows);
  std::vector<std::set<std::size_t>> col_rows(a.cols());
  for (std::size_t r = 0; r < n_rows; ++r) {
    const auto cols = a.row_cols(r);
    const auto vals = a.row_values(r);
    rows[r].reserve(cols.size());
    for (std::size_t k = 0; k < cols.size(); ++k) {
      Value v = field.from(vals[k]);
      if (field.is_zero(v)) continue;
      rows[r].push_back({cols[k], std::move(v)});
      col_rows[cols[k]].insert(r);
    }
  }

  std::set<std::pair<std::size_t, std::size_t>> queue;  // (length, row)
  for (std::size_t r = 0; r < n_rows; ++r) {
    if (!rows[r].empty()) queue.emplace(rows[r].size(), r);
  }

  std::size_t rank = 0;
  Row merged;
  while (!queue.empty()) {
    const std::size_t r = queue.begin()->second;
    queue.erase(queue.begin());
    Row pivot_row = std::move(rows[r]);
    rows[r].clear();

    std::size_t best = 0;
    for (std::size_t k = 1; k < pivot_row.size(); ++k) {
      const std::size_t ck = pivot_row[k].col;
      const std::size_t cb = pivot_row[best].col;
      const std::size_t nk = col_rows[ck].size();
      const std::size_t nb = col_rows[cb].size();
      if (nk < nb || (nk == nb && ck == r && cb != r)) best = k;
    }
    const std::size_t pivot_col = pivot_row[best].col;
    const Value pivot = pivot_row[best].value;
    ++rank;

    for (const auto& e : pivot_row) col_rows[e.col].erase(r);
    const std::vector<std::size_t> targets(col_rows[pivot_col].begin(), col_rows[pivot_col].end());

    for (std::size_t i : targets) {
      Row& row = rows[i];
      queue.erase({row.size(), i});
      auto hit = std::lower_bound(row.begin(), row.end(), pivot_col,
                                  [](const Entry& e, std::size_t c) { return e.col < c; });
      const Value factor = field.ratio(hit->value, pivot);

      merged.clear();
      merged.reserve(row.size() + pivot_row.size());
      std::size_t p = 0;
      std::size_t q = 0;
      while (p < row.size() || q < pivot_row.size()) {
        if (q == pivot_row.size() || (p < row.size() && row[p].col < pivot_row[q].col)) {
          merged.push_back(std::move(row[p++]));
        } else if (p == row.size() || pivot_row[q].col < row[p].col) {
          const std::size_t c = pivot_row[q].col;
          merged.push_back({c, field.neg_mul(factor, pivot_row[q].value)});
          col_rows[c].insert(i);
          ++q;
        } else {
          const std::size_t c = row[p].col;
          Value v = field.sub_mul(row[p].value, factor, pivot_row[q].value);
          if (c == pivot_col || field.is_zero(v)) {
            col_rows[c].erase(i);
          } else {
            merged.push_back({c, std::move(v)});
          }
          ++p;
          ++q;
        }
      }
      row.swap(merged);
      if (!row.empty()) queue.emplace(row.size(), i);
    }
  }
  return rank;
}

}  // namespace

std::size_t rational_rank(const SparseIntMatrix& a) { return markowitz_rank(a, RationalField{}); }

std::size_t rank_mod(const SparseIntMatrix& a, std::uint64_t p) {
  return markowitz_rank(a, PrimeField{modular::Montgomery(p)});
}

std::size_t exact_rank(const SparseIntMatrix& a) {
  if (std::max(a.rows(), a.cols()) <= kRationalRankLimit) return rational_rank(a);
  std::size_t rank = 0;
  for (std::uint64_t p : modular::primes(2)) rank = std::max(rank, rank_mod(a, p));
  return rank;
}

// ---------------------------------------------------------------------------

namespace modular {

Montgomery::Montgomery(std::uint64_t p) : p_(p) {
  if (p % 2 == 0 || p >= (std::uint64_t{1} << 62) || p < 3) {
    throw Error("Montgomery modulus must be odd and below 2^62");
  }
  std::uint64_t inv = p;  // Newton iteration for p^-1 mod 2^64
  for (int i = 0; i < 6; ++i) inv *= 2 - p * inv;
  neg_inv_ = ~inv + 1;
  const std::uint64_t r = static_cast<std::uint64_t>((static_cast<u128>(1) << 64) % p);
  r2_ = static_cast<std::uint64_t>(static_cast<u128>(r) * r % p);
  one_ = r;
}

std::uint64_t Montgomery::pow(std::uint64_t a, std::uint64_t e) const {
  std::uint64_t result = one_;
  while (e > 0) {
    if (e & 1) result = mul(result, a);
    a = mul(a, a);
    e >>= 1;
  }
  return result;
}

std::span<const std::uint64_t> primes(std::size_t k) {
  static std::mutex mutex;
  static std::vector<std::uint64_t> cache;
  std::lock_guard lock(mutex);
  std::uint64_t candidate = cache.empty() ? (std::uint64_t{1} << 62) - 1 : cache.back() - 2;
  while (cache.size() < k) {
    mpz_class z(std::to_string(candidate));
    if (mpz_probab_prime_p(z.get_mpz_t(), 40) > 0) cache.push_back(candidate);
    candidate -= 2;
  }
  return std::span<const std::uint64_t>(cache).first(k);
}

std::vector<std::uint64_t> characteristic_polynomial_mod(const SparseIntMatrix& a, std::uint64_t p) {
  if (a.rows() != a.cols()) throw DimensionMismatch("characteristic polynomial of a non-square matrix");
  const std::size_t n = a.rows();
  const Montgomery f(p);
  std::vector<std::uint64_t> h(n * n, 0);
  auto at = [&](std::size_t r, std::size_t c) -> std::uint64_t& { return h[r * n + c]; };
  for (const auto& [r, c, v] : a.triplets()) {
    const std::uint64_t mag = static_cast<std::uint64_t>(v < 0 ? -v : v) % p;
    at(r, c) = f.to(v < 0 ? (p - mag) % p : mag);
  }

  // Similarity transforms to upper Hessenberg form.
  for (std::size_t k = 0; k + 2 < n; ++k) {
    std::size_t piv = k + 1;
    while (piv < n && at(piv, k) == 0) ++piv;
    if (piv == n) continue;
    if (piv != k + 1) {
      for (std::size_t c = 0; c < n; ++c) std::swap(at(piv, c), at(k + 1, c));
      for (std::size_t r = 0; r < n; ++r) std::swap(at(r, piv), at(r, k + 1));
    }
    const std::uint64_t inv = f.inv(at(k + 1, k));
    for (std::size_t r = k + 2; r < n; ++r) {
      if (at(r, k) == 0) continue;
      const std::uint64_t u = f.mul(at(r, k), inv);
      std::uint64_t* dst = &at(r, 0);
      const std::uint64_t* src = &at(k + 1, 0);
      for (std::size_t c = k; c < n; ++c) dst[c] = f.sub(dst[c], f.mul(u, src[c]));
      for (std::size_t rr = 0; rr < n; ++rr) at(rr, k + 1) = f.add(at(rr, k + 1), f.mul(u, at(rr, r)));
    }
  }

  // p_k(t) = (t - h_kk) p_{k-1}(t) - sum_{i<k} h_ik (prod_{l=i+1..k} h_{l,l-1}) p_{i-1}(t),
  // with 1-based indices; polys[k] has degree k.
  std::vector<std::vector<std::uint64_t>> polys(n + 1);
  polys[0] = {f.one()};
  for (std::size_t k = 1; k <= n; ++k) {
    std::vector<std::uint64_t> next(k + 1, 0);
    const auto& prev = polys[k - 1];
    const std::uint64_t diag = at(k - 1, k - 1);
    for (std::size_t d = 0; d < prev.size(); ++d) {
      next[d + 1] = f.add(next[d + 1], prev[d]);
      next[d] = f.sub(next[d], f.mul(diag, prev[d]));
    }
    std::uint64_t run = f.one();
    for (std::size_t i = k - 1; i >= 1; --i) {
      run = f.mul(run, at(i, i - 1));
      if (run == 0) break;
      const std::uint64_t coef = f.mul(at(i - 1, k - 1), run);
      if (coef != 0) {
        const auto& older = polys[i - 1];
        for (std::size_t d = 0; d < older.size(); ++d) next[d] = f.sub(next[d], f.mul(coef, older[d]));
      }
    }
    polys[k] = std::move(next);
  }
  std::vector<std::uint64_t> out(n + 1);
  for (std::size_t d = 0; d <= n; ++d) out[d] = f.from(polys[n][d]);
  return out;
}

}  // namespace modular

double charpoly_coefficient_bound_log2(const SparseIntMatrix& a) {
  std::vector<double> col_sq(a.cols(), 0.0);
  for (const auto& [r, c, v] : a.triplets()) col_sq[c] += static_cast<double>(v) * static_cast<double>(v);
  double bits = 0.0;
  for (double s : col_sq) bits += std::log2(1.0 + std::sqrt(s));
  return bits;
}

std::vector<mpz_class> characteristic_polynomial(const SparseIntMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionMismatch("characteristic polynomial of a non-square matrix");
  const std::size_t n = a.rows();
  // Moduli must exceed 2 * bound for symmetric residues; pad for rounding.
  const double needed_bits = charpoly_coefficient_bound_log2(a) + 4.0;
  const auto prime_count = static_cast<std::size_t>(std::ceil(needed_bits / 61.0)) + 1;
  const auto ps = modular::primes(prime_count);

  std::vector<mpz_class> value(n + 1, 0);
  mpz_class modulus = 1;
  for (std::uint64_t p : ps) {
    const auto residues = modular::characteristic_polynomial_mod(a, p);
    const mpz_class pz(std::to_string(p));
    mpz_class m_mod_p = modulus % pz;
    mpz_class m_inv;
    mpz_invert(m_inv.get_mpz_t(), m_mod_p.get_mpz_t(), pz.get_mpz_t());
    for (std::size_t d = 0; d <= n; ++d) {
      mpz_class r(std::to_string(residues[d]));
      mpz_class t = ((r - value[d] % pz) * m_inv) % pz;
      if (t < 0) t += pz;
      value[d] += modulus * t;
    }
    modulus *= pz;
  }
  const mpz_class half = modulus / 2;
  for (auto& c : value) {
    if (c > half) c -= modulus;
  }
  return value;
}

}  // namespace l2approx
