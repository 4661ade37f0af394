#include <doctest.h>

#include <cmath>

#include "l2approx/analysis.hpp"
#include "support.hpp"

using namespace l2approx;

namespace {

constexpr auto kAbs = BoundaryCondition::absolute;
constexpr auto kRel = BoundaryCondition::relative;

double path_count_fraction(std::size_t m, double lambda) {
  std::size_t count = 0;
  for (double mu : support::path_eigenvalues(m + 1)) count += mu <= lambda ? 1 : 0;
  return static_cast<double>(count) / static_cast<double>(m);
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("Betti convergence on the circle") {
  const std::size_t ms[] = {2, 4, 8, 16, 100};
  const ConvergenceReport r = betti_convergence(support::fixture("circle"), 0, kAbs, ms, 256);
  REQUIRE(r.rows.size() == 5);
  for (const auto& row : r.rows) {
    CHECK(row.betti == 1);
    CHECK(row.F0 == 1.0 / static_cast<double>(row.m));
    CHECK(row.residual == doctest::Approx(1.0 / static_cast<double>(row.m)));
  }
  CHECK(r.oracle_betti == 0.0);
  CHECK(r.pass);
  AnalysisOptions strict;
  strict.betti_tolerance = 1e-3;
  CHECK_FALSE(betti_convergence(support::fixture("circle"), 0, kAbs, ms, 256, strict).pass);
}

TEST_CASE("Betti convergence on the wedge and the torus") {
  const std::size_t ms[] = {1, 3, 9, 27};
  const ConvergenceReport w = betti_convergence(support::fixture("wedge"), 1, kAbs, ms, 256);
  for (const auto& row : w.rows) CHECK(row.F0 == 1.0);
  CHECK(w.oracle_betti == doctest::Approx(1.0));
  CHECK(w.rows.back().residual <= 1e-12);
  CHECK(w.pass);
  const ConvergenceReport wr = betti_convergence(support::fixture("wedge"), 1, kRel, ms, 256);
  for (const auto& row : wr.rows) CHECK(std::abs(row.F0 - 1.0) <= 2.0 / static_cast<double>(row.m));

  const std::size_t tm[] = {1, 2, 4, 8};
  const ConvergenceReport t = betti_convergence(support::fixture("torus"), 1, kAbs, tm, 32);
  for (const auto& row : t.rows) CHECK(row.F0 == 0.0);
  CHECK(t.oracle_betti == 0.0);
  CHECK(t.pass);
}

TEST_CASE("m lists must increase") {
  const std::size_t bad[] = {4, 4};
  CHECK_THROWS_AS(betti_convergence(support::fixture("circle"), 0, kAbs, bad, 16), Error);
  CHECK_THROWS_AS(require_increasing(std::span<const std::size_t>{}), Error);
  const std::size_t zero[] = {0, 1};
  CHECK_THROWS_AS(require_increasing(zero), Error);
}

TEST_CASE("tail bound") {
  const SpectrumSummary path = piece_spectrum(support::fixture("circle"), 0, kAbs, 1);
  const double half[] = {0.5};
  const TailBoundLedger l1 = tail_bound_check(path, 4.0, 2.0, half, 1);
  CHECK(l1.entries[0].lhs == 0.0);
  CHECK(l1.entries[0].rhs == doctest::Approx(2.0 * std::log(4.0) / std::log(2.0)));
  CHECK(l1.violations() == 0);

  const SpectrumSummary c100 = piece_spectrum(support::fixture("circle"), 0, kAbs, 100);
  const double small[] = {0.01};
  const TailBoundLedger l2 = tail_bound_check(c100, 4.0, c100.cochain_ratio(), small, 100);
  CHECK(l2.entries[0].lhs == doctest::Approx(path_count_fraction(100, 0.01) - 0.01));
  CHECK(l2.violations() == 0);

  const SpectrumSummary t8 = piece_spectrum(support::fixture("torus"), 0, kAbs, 8);
  const double tenth[] = {0.1};
  CHECK(tail_bound_check(t8, 8.0, 1.0, tenth, 8).violations() == 0);

  const double outside[] = {1.5};
  CHECK_THROWS_AS(tail_bound_check(path, 4.0, 1.0, outside), Error);
  // a deliberately tiny a produces a recorded violation
  const double mid[] = {0.9};
  const TailBoundLedger v = tail_bound_check(c100, 4.0, 1e-6, mid, 100);
  CHECK(v.violations() == 1);
  CHECK(v.entries[0].slack < 0);
}

TEST_CASE("trace approximation") {
  const std::int64_t x[] = {0, 1};
  const std::size_t m10[] = {10};
  const TraceApproxLedger l = trace_approximation_check(support::fixture("circle"), 0, x, m10);
  CHECK(l.rows[0].vn_side == 2.0);
  CHECK(l.rows[0].finite_side == 2.0);
  CHECK(l.rows[0].difference == 0.0);
  CHECK(l.all_within_bound());

  const std::int64_t one[] = {1};
  const std::size_t ms[] = {3, 10, 50};
  const TraceApproxLedger c = trace_approximation_check(support::fixture("circle"), 0, one, ms);
  for (const auto& row : c.rows) CHECK(row.difference == doctest::Approx(1.0 / static_cast<double>(row.m)));
  CHECK(c.all_within_bound());

  const std::int64_t x2[] = {0, 0, 1};
  const std::size_t m50[] = {50};
  const TraceApproxLedger q = trace_approximation_check(support::fixture("circle"), 0, x2, m50);
  CHECK(q.C == 4.0);
  CHECK(q.rows[0].collar == 6);
  CHECK(q.rows[0].bound == doctest::Approx(2.0 * 6.0 / 50.0 * 16.0));
  // brute force: trace of the squared path Laplacian on 51 vertices
  const double finite = (2.0 * 2.0 + 49.0 * 6.0) / 50.0;
  CHECK(q.rows[0].finite_side == doctest::Approx(finite));
  CHECK(q.rows[0].difference == doctest::Approx(std::abs(6.0 - finite)));
  CHECK(q.all_within_bound());

  const std::int64_t deg9[] = {0, 0, 0, 0, 0, 0, 0, 0, 0, 1};
  CHECK_THROWS_AS(trace_approximation_check(support::fixture("circle"), 0, deg9, m10), Error);
}

TEST_CASE("determinant class report on the circle") {
  const std::size_t ms[] = {1, 2, 10, 100, 200, 400};
  const DetClassReport r = det_class_report(support::fixture("circle"), 0, kAbs, ms, 256);
  CHECK(r.K2 == 4.0);
  CHECK(r.rows[0].det_prime == mpz_class(2));
  CHECK(r.rows[0].normalized_log_det == doctest::Approx(std::log(2.0)));
  for (const auto& row : r.rows) {
    const double m = static_cast<double>(row.m);
    CHECK(std::abs(row.normalized_log_det - std::log(m + 1.0) / m) <= 1e-9);
    CHECK(std::abs(row.integral_closed - row.integral_stieltjes) <= 1e-10);
    CHECK(row.integral_slack >= -1e-12);
    CHECK(row.det_ok);
    CHECK(row.integral_slack == doctest::Approx(row.normalized_log_det));
  }
  CHECK(std::abs(r.oracle_log_det) <= 0.01);
  CHECK(r.determinant_class());
  CHECK(r.oracle_cutoff == doctest::Approx(4e-6));
}

TEST_CASE("determinant class report on the torus") {
  const std::size_t ms[] = {2, 4, 8};
  const DetClassReport r = det_class_report(support::fixture("torus"), 0, kAbs, ms, 64);
  for (const auto& row : r.rows) {
    REQUIRE(row.det_prime.has_value());
    CHECK(*row.det_prime >= 1);
    CHECK(row.integral_slack >= 0.0);
  }
  CHECK(r.oracle_log_det >= -0.01);
  CHECK(r.determinant_class());
  const std::size_t rel[] = {3, 5};
  for (int j = 0; j <= 2; ++j) CHECK(det_class_report(support::fixture("torus"), j, kRel, rel, 32).integral_bound_holds);
}

TEST_CASE("gap diagnostic") {
  const std::size_t ms[] = {10, 200};
  const auto rows = gap_diagnostic(support::fixture("circle"), 0, kAbs, ms, 0.5);
  CHECK(rows[1].g == doctest::Approx(path_count_fraction(200, 0.5) - 1.0 / 200.0));
  const VNDensity vn = density(laplacians(support::fixture("circle")).laplacians[0]);
  CHECK(std::abs(rows[1].g - (vn.F(0.5) - vn.F(0.0))) <= 0.02);

  for (const auto& name : support::fixture_names()) {
    const PeriodicComplex& x = support::fixture(name);
    const LaplacianFamily f = laplacians(x);
    for (int j = 0; j <= x.top_dimension(); ++j) {
      const std::size_t m4[] = {4};
      const auto g = gap_diagnostic(x, j, kAbs, m4, f.K2(j));
      const SpectrumSummary s = piece_spectrum(x, j, kAbs, 4);
      CHECK(g[0].g == doctest::Approx(s.cochain_ratio() - s.F(0.0)));
    }
  }
  const std::size_t wm[] = {64};
  const auto w = gap_diagnostic(support::fixture("wedge"), 1, kAbs, wm, 0.1);
  const VNDensity wv = density(laplacians(support::fixture("wedge")).laplacians[1]);
  CHECK(std::abs(w[0].g - (wv.F(0.1) - wv.F(0.0))) <= 0.05);
  CHECK_THROWS_AS(gap_diagnostic(support::fixture("circle"), 0, kAbs, ms, 0.0), Error);
}

TEST_CASE("sandwich on the circle") {
  std::vector<SpectrumSummary> window;
  for (std::size_t m : {16, 32, 64}) window.push_back(piece_spectrum(support::fixture("circle"), 0, kAbs, m));
  const VNDensity vn = density(laplacians(support::fixture("circle")).laplacians[0]);
  const double lambdas[] = {0.0, 0.3, 1.0, 2.0, 3.5, 4.0};
  for (double eps : {0.05, 0.1}) {
    for (const auto& e : sandwich_check(window, vn, lambdas, eps, 0.05)) {
      CHECK(e.lower_ok);
      CHECK(e.upper_ok);
    }
  }
}

TEST_CASE("absolute and relative F_m(0) approach each other") {
  // c fitted once on these fixtures: the gap is at most 2 / m.
  const double c = 2.0;
  for (const auto& name : support::fixture_names()) {
    const PeriodicComplex& x = support::fixture(name);
    for (int j = 0; j <= x.top_dimension(); ++j) {
      for (std::size_t m : {4, 8, 16}) {
        const double a = piece_spectrum(x, j, kAbs, m).F(0.0);
        const double r = piece_spectrum(x, j, kRel, m).F(0.0);
        CHECK(std::abs(a - r) <= c / static_cast<double>(m));
      }
    }
  }
}

TEST_CASE("F_m(0) converges between m=8 and m=64") {
  for (const auto& name : support::fixture_names()) {
    const PeriodicComplex& x = support::fixture(name);
    const LaplacianFamily f = laplacians(x);
    for (int j = 0; j <= x.top_dimension(); ++j) {
      OracleOptions o;
      o.grid_size = x.deck_rank() == 1 ? 256 : 64;
      const double target = density(f.laplacians[static_cast<std::size_t>(j)], o).betti();
      const std::size_t pair[] = {8, 64};
      const auto r = betti_convergence(x, j, kAbs, pair, o.grid_size);
      CHECK(r.rows[1].residual <= r.rows[0].residual);
      CHECK(r.rows[1].residual <= 1.0 / 64.0 + 1e-12);
      CHECK(r.oracle_betti == target);
    }
  }
}

}
