#include <doctest.h>

#include <cmath>
#include <random>

#include "l2approx/laurent.hpp"
#include "l2approx/periodic_complex.hpp"
#include "support.hpp"

using namespace l2approx;

namespace {

LaurentPoly t_pow(long k, long c = 1) { return LaurentPoly::monomial(Shift{k}, c); }

LaurentMatrix scalar(const LaurentPoly& p) {
  LaurentMatrix m(1, 1, p.rank());
  m.set(0, 0, p);
  return m;
}

LaurentPoly circle_laplacian() { return t_pow(0, 2) - t_pow(1) - t_pow(-1); }

std::map<long, mpz_class> as_map(const LaurentPoly& p) {
  std::map<long, mpz_class> out;
  for (const auto& [s, c] : p.terms()) out[s[0]] = c;
  return out;
}

}  // namespace

TEST_SUITE("laurent_algebra") {

TEST_CASE("product (t - 1)(t^-1 - 1) is 2 - t - t^-1") {
  const LaurentPoly p = (t_pow(1) - t_pow(0)) * (t_pow(-1) - t_pow(0));
  CHECK(p == circle_laplacian());
  CHECK(p.coefficient(Shift{0}) == 2);
  CHECK(p.coefficient(Shift{1}) == -1);
  CHECK(p.coefficient(Shift{-1}) == -1);
  CHECK(p.terms().size() == 3);
  const LaurentMatrix m = multiply(scalar(t_pow(1) - t_pow(0)), scalar(t_pow(-1) - t_pow(0)));
  CHECK(m.at(0, 0) == circle_laplacian());
}

TEST_CASE("multiplying by the identity changes nothing") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const LaurentMatrix a = support::random_matrix(rng, 3, 2, 2);
    CHECK(multiply(a, LaurentMatrix::identity(2, 2)) == a);
    CHECK(multiply(LaurentMatrix::identity(3, 2), a) == a);
  }
}

TEST_CASE("square of the circle Laplacian against brute-force convolution") {
  const LaurentPoly sq = circle_laplacian() * circle_laplacian();
  CHECK(sq.constant_term() == 6);
  CHECK(as_map(sq) == support::convolve(as_map(circle_laplacian()), as_map(circle_laplacian())));
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const LaurentPoly a = support::random_poly(rng, 1, 5, 4);
    const LaurentPoly b = support::random_poly(rng, 1, 5, 4);
    CHECK(as_map(a * b) == support::convolve(as_map(a), as_map(b)));
  }
}

TEST_CASE("dimension mismatch is rejected") {
  CHECK_THROWS_AS(multiply(LaurentMatrix(2, 3, 1), LaurentMatrix(2, 3, 1)), DimensionMismatch);
  CHECK_THROWS_AS(multiply(LaurentMatrix(2, 2, 1), LaurentMatrix(2, 2, 2)), DimensionMismatch);
}

TEST_CASE("no stored coefficient is zero") {
  LaurentPoly p = t_pow(3, 2);
  p.add_term(Shift{3}, -2);
  CHECK(p.is_zero());
  CHECK((t_pow(1) - t_pow(1)).terms().empty());
  LaurentMatrix m(2, 2, 1);
  m.add_to(0, 1, t_pow(2));
  m.add_to(0, 1, -t_pow(2));
  CHECK(m.is_zero());
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const LaurentMatrix a = support::random_matrix(rng, 2, 3, 1);
    const LaurentMatrix b = support::random_matrix(rng, 3, 2, 1);
    const LaurentMatrix ab = multiply(a, b);
    for (const auto& [idx, poly] : ab.entries()) {
      CHECK_FALSE(poly.is_zero());
      for (const auto& [s, c] : poly.terms()) {
        CHECK(c != 0);
        CHECK(s.rank() == 1);
      }
    }
  }
}

TEST_CASE("adjoint negates shifts and transposes") {
  CHECK(adjoint(scalar(t_pow(1) - t_pow(0))).at(0, 0) == t_pow(-1) - t_pow(0));
  LaurentMatrix c(2, 3, 1);
  c.set(0, 2, t_pow(0, 5));
  c.set(1, 0, t_pow(0, -2));
  const LaurentMatrix ca = adjoint(c);
  CHECK(ca.rows() == 3);
  CHECK(ca.at(2, 0) == t_pow(0, 5));
  CHECK(ca.at(0, 1) == t_pow(0, -2));
}

TEST_CASE("adjoint is an involution and reverses products") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    const LaurentMatrix a = support::random_matrix(rng, 2, 3, 2);
    const LaurentMatrix b = support::random_matrix(rng, 3, 2, 2);
    CHECK(adjoint(adjoint(a)) == a);
    CHECK(adjoint(multiply(a, b)) == multiply(adjoint(b), adjoint(a)));
  }
}

TEST_CASE("multiplication is associative") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    const LaurentMatrix a = support::random_matrix(rng, 2, 3, 1);
    const LaurentMatrix b = support::random_matrix(rng, 3, 2, 1);
    const LaurentMatrix c = support::random_matrix(rng, 2, 2, 1);
    CHECK(multiply(multiply(a, b), c) == multiply(a, multiply(b, c)));
  }
}

TEST_CASE("evaluation on the torus") {
  for (double theta : {0.0, 0.1, 0.25, 0.7}) {
    const double th[] = {theta};
    CHECK(circle_laplacian().evaluate(th).real() == doctest::Approx(2 - 2 * std::cos(2 * M_PI * theta)));
    CHECK(std::abs(circle_laplacian().evaluate(th).imag()) < 1e-12);
  }
  const double quarter[] = {0.25};
  const auto& circle = support::fixture("circle");
  CHECK(evaluate(laplacians(circle).laplacians[0], quarter)(0, 0).real() == doctest::Approx(2.0));

  std::mt19937_64 rng(31);
  const double zero[] = {0.0, 0.0};
  const double th[] = {0.3, 0.85};
  for (int trial = 0; trial < 10; ++trial) {
    const LaurentMatrix a = support::random_matrix(rng, 2, 3, 2);
    const Eigen::MatrixXcd at0 = evaluate(a, zero);
    for (std::size_t r = 0; r < 2; ++r) {
      for (std::size_t c = 0; c < 3; ++c) {
        mpz_class sum = 0;
        const LaurentPoly entry = a.at(r, c);
        for (const auto& [s, x] : entry.terms()) sum += x;
        CHECK(at0(static_cast<long>(r), static_cast<long>(c)).real() == doctest::Approx(sum.get_d()));
      }
    }
    CHECK((evaluate(adjoint(a), th) - evaluate(a, th).adjoint()).norm() < 1e-12);
  }
}

TEST_CASE("von Neumann trace of powers") {
  const LaurentMatrix delta = scalar(circle_laplacian());
  CHECK(vn_trace_power(delta, 0) == 1);
  CHECK(vn_trace_power(delta, 1) == 2);
  CHECK(vn_trace_power(delta, 2) == 6);
  CHECK(vn_trace_power(delta, 3) == 20);
  // central binomial coefficients, against repeated convolution
  std::map<long, mpz_class> acc{{0, 1}};
  for (unsigned k = 1; k <= 8; ++k) {
    acc = support::convolve(acc, as_map(circle_laplacian()));
    mpz_class binom;
    mpz_bin_uiui(binom.get_mpz_t(), 2 * k, k);
    CHECK(vn_trace_power(delta, k) == acc[0]);
    CHECK(vn_trace_power(delta, k) == binom);
  }
  CHECK(vn_trace_power(LaurentMatrix::identity(4, 2), 0) == 4);
  CHECK(vn_trace_power(delta, 5) == power(delta, 5).at(0, 0).constant_term());
}

TEST_CASE("vn trace of A* A is the sum of squared coefficients") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 30; ++trial) {
    const LaurentMatrix a = support::random_matrix(rng, 3, 2, 2);
    mpz_class squares = 0;
    for (const auto& [idx, p] : a.entries()) {
      for (const auto& [s, c] : p.terms()) squares += c * c;
    }
    const mpz_class tr = vn_trace_power(multiply(adjoint(a), a), 1);
    CHECK(tr >= 0);
    CHECK(tr == squares);
  }
}

TEST_CASE("shift and polynomial text forms are canonical") {
  CHECK(Shift{1, -2}.to_string() == "[1,-2]");
  CHECK(Shift{3, -1}.l1_norm() == 4);
  CHECK(Shift{3, -5}.linf_norm() == 5);
  CHECK(circle_laplacian().to_string() == circle_laplacian().to_string());
  CHECK(circle_laplacian().max_shift_linf() == 1);
  CHECK(circle_laplacian().abs_coefficient_sum() == 4);
  CHECK(circle_laplacian().involution() == circle_laplacian());
}

}
