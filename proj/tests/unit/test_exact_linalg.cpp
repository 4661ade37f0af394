#include <doctest.h>

#include <random>
#include <sstream>

#include "l2approx/exact_linalg.hpp"
#include "l2approx/sparse_int.hpp"
#include "support.hpp"

using namespace l2approx;

namespace {

// Dense Gauss-Jordan over Q, row by row with the first nonzero pivot.
std::size_t dense_rank(std::vector<std::vector<mpq_class>> a) {
  std::size_t rank = 0;
  const std::size_t rows = a.size();
  const std::size_t cols = rows ? a[0].size() : 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t p = rank;
    while (p < rows && a[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(a[p], a[rank]);
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == rank || a[r][c] == 0) continue;
      const mpq_class f = a[r][c] / a[rank][c];
      for (std::size_t k = c; k < cols; ++k) a[r][k] -= f * a[rank][k];
    }
    ++rank;
  }
  return rank;
}

std::vector<std::vector<mpq_class>> to_mpq(const SparseIntMatrix& m) {
  std::vector<std::vector<mpq_class>> out(m.rows(), std::vector<mpq_class>(m.cols(), 0));
  for (const auto& [r, c, v] : m.triplets()) out[r][c] = static_cast<long>(v);
  return out;
}

SparseIntMatrix random_rect(std::mt19937_64& rng, std::size_t rows, std::size_t cols, int magnitude, double fill) {
  std::uniform_int_distribution<int> value(-magnitude, magnitude);
  std::bernoulli_distribution keep(fill);
  std::vector<SparseIntMatrix::Triplet> t;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      if (keep(rng)) t.emplace_back(i, j, value(rng));
    }
  }
  return SparseIntMatrix::from_triplets(rows, cols, std::move(t));
}

// Low-rank integer matrix U V with U rows x k and V k x cols.
SparseIntMatrix low_rank(std::mt19937_64& rng, std::size_t rows, std::size_t cols, std::size_t k) {
  return random_rect(rng, rows, k, 3, 0.7) * random_rect(rng, k, cols, 3, 0.7);
}

}  // namespace

TEST_SUITE("exact_linalg") {

TEST_CASE("sparse integer matrix basics") {
  const auto a = SparseIntMatrix::from_triplets(2, 3, {{0, 1, 2}, {0, 1, 3}, {1, 0, -1}, {1, 2, 0}});
  CHECK(a.nonzeros() == 2);
  CHECK(a.at(0, 1) == 5);
  CHECK(a.at(1, 2) == 0);
  const SparseIntMatrix at = a.transpose();
  CHECK(at.rows() == 3);
  CHECK(at.at(1, 0) == 5);
  CHECK((a * at).at(0, 0) == 25);
  CHECK((a * at).is_symmetric());
  const std::size_t rows[] = {1};
  const std::size_t cols[] = {0, 1};
  CHECK(a.submatrix(rows, cols).at(0, 0) == -1);
  CHECK(SparseIntMatrix::identity(4).trace() == 4);
  std::ostringstream os;
  write_triples(os, a);
  CHECK(os.str() == "2 3 2\n0 1 5\n1 0 -1\n");
  const auto big = SparseIntMatrix::from_triplets(1, 1, {{0, 0, std::int64_t{1} << 40}});
  CHECK_THROWS(big * big);
  CHECK_THROWS_AS(a * a, DimensionMismatch);
}

TEST_CASE("exact rank against dense elimination over Q") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t rows = 1 + rng() % 12;
    const std::size_t cols = 1 + rng() % 12;
    const SparseIntMatrix a = trial % 2 ? random_rect(rng, rows, cols, 4, 0.4) : low_rank(rng, rows, cols, 1 + rng() % 4);
    CHECK(exact_rank(a) == dense_rank(to_mpq(a)));
    CHECK(exact_rank(a.transpose()) == exact_rank(a));
  }
  CHECK(exact_rank(SparseIntMatrix(0, 0)) == 0);
  CHECK(exact_rank(SparseIntMatrix(3, 5)) == 0);
  CHECK(exact_rank(SparseIntMatrix::identity(7)) == 7);
}

TEST_CASE("rank modulo a large prime agrees with the rational rank") {
  std::mt19937_64 rng(103);
  const auto primes = modular::primes(2);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t rows = 1 + rng() % 15;
    const std::size_t cols = 1 + rng() % 15;
    const SparseIntMatrix a = trial % 2 ? random_rect(rng, rows, cols, 5, 0.5) : low_rank(rng, rows, cols, 1 + rng() % 5);
    const std::size_t q = rational_rank(a);
    for (std::uint64_t p : primes) CHECK(rank_mod(a, p) == q);
  }
  std::vector<SparseIntMatrix::Triplet> t{{0, 0, 3}, {0, 1, 3}, {1, 0, 3}, {1, 1, 6}};
  const auto a = SparseIntMatrix::from_triplets(2, 2, t);
  CHECK(rational_rank(a) == 2);
  CHECK(rank_mod(a, 3) == 0);
}

TEST_CASE("exact rank beyond the rational limit") {
  // Path Laplacian of length kRationalRankLimit + 50: kernel is the constants.
  const std::size_t n = kRationalRankLimit + 50;
  std::vector<SparseIntMatrix::Triplet> t;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    t.emplace_back(i, i + 1, -1);
    t.emplace_back(i + 1, i, -1);
  }
  for (std::size_t i = 0; i < n; ++i) t.emplace_back(i, i, i == 0 || i + 1 == n ? 1 : 2);
  const auto lap = SparseIntMatrix::from_triplets(n, n, t);
  CHECK(exact_rank(lap) == n - 1);
  CHECK(exact_rank(SparseIntMatrix::identity(n)) == n);
}

TEST_CASE("rank is exact where floating point would struggle") {
  // Hilbert-like integer matrix scaled: rows differ by tiny relative amounts.
  std::vector<SparseIntMatrix::Triplet> t;
  const std::int64_t big = 1'000'000'007;
  t.emplace_back(0, 0, big);
  t.emplace_back(0, 1, big + 1);
  t.emplace_back(1, 0, big + 1);
  t.emplace_back(1, 1, big + 2);
  CHECK(exact_rank(SparseIntMatrix::from_triplets(2, 2, t)) == 2);
  t.clear();
  t.emplace_back(0, 0, big);
  t.emplace_back(0, 1, 2 * big);
  t.emplace_back(1, 0, 3 * big);
  t.emplace_back(1, 1, 6 * big);
  CHECK(exact_rank(SparseIntMatrix::from_triplets(2, 2, t)) == 1);
}

TEST_CASE("characteristic polynomial of the two-vertex path") {
  const auto a = SparseIntMatrix::from_triplets(2, 2, {{0, 0, 1}, {0, 1, -1}, {1, 0, -1}, {1, 1, 1}});
  CHECK(characteristic_polynomial(a) == std::vector<mpz_class>{0, -2, 1});
  CHECK(characteristic_polynomial(SparseIntMatrix(0, 0)) == std::vector<mpz_class>{1});
}

TEST_CASE("multimodular characteristic polynomial against Berkowitz") {
  std::mt19937_64 rng(103);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + rng() % 14;
    const SparseIntMatrix a = trial % 3 == 0 ? random_rect(rng, n, n, 9, 0.5) : support::random_symmetric(rng, n, 5, 0.5);
    CHECK(characteristic_polynomial(a) == support::berkowitz(support::to_mpz(a)));
  }
  // large entries force several primes
  const SparseIntMatrix big = random_rect(rng, 12, 12, 1'000'000'000, 0.8);
  CHECK(characteristic_polynomial(big) == support::berkowitz(support::to_mpz(big)));
  CHECK(charpoly_coefficient_bound_log2(big) > 62.0);
}

TEST_CASE("Montgomery arithmetic") {
  const auto ps = modular::primes(3);
  REQUIRE(ps.size() == 3);
  CHECK(ps[0] < (std::uint64_t{1} << 62));
  CHECK(ps[0] > ps[1]);
  CHECK(ps[1] > ps[2]);
  for (std::uint64_t p : ps) {
    mpz_class z(std::to_string(p));
    CHECK(mpz_probab_prime_p(z.get_mpz_t(), 30) > 0);
  }
  const std::uint64_t p = ps[0];
  const modular::Montgomery mont(p);
  std::mt19937_64 rng(107);
  for (int i = 0; i < 200; ++i) {
    const std::uint64_t a = rng() % p;
    const std::uint64_t b = rng() % p;
    const auto expected = static_cast<std::uint64_t>(static_cast<modular::u128>(a) * b % p);
    CHECK(mont.from(mont.mul(mont.to(a), mont.to(b))) == expected);
    CHECK(mont.from(mont.add(mont.to(a), mont.to(b))) == (a + b) % p);
    CHECK(mont.from(mont.sub(mont.to(a), mont.to(b))) == (a + p - b) % p);
    if (a != 0) CHECK(mont.from(mont.mul(mont.inv(mont.to(a)), mont.to(a))) == 1);
  }
}

TEST_CASE("charpoly modulo a prime matches the integer charpoly reduced") {
  std::mt19937_64 rng(109);
  const std::uint64_t p = modular::primes(1)[0];
  const mpz_class P(std::to_string(p));
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + rng() % 10;
    const SparseIntMatrix a = random_rect(rng, n, n, 20, 0.6);
    const auto exact = support::berkowitz(support::to_mpz(a));
    const auto mod = modular::characteristic_polynomial_mod(a, p);
    REQUIRE(mod.size() == exact.size());
    for (std::size_t i = 0; i < exact.size(); ++i) {
      mpz_class r = exact[i] % P;
      if (r < 0) r += P;
      CHECK(r.get_str() == std::to_string(mod[i]));
    }
  }
}

}
