#include "l2approx/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "l2approx/errors.hpp"
#include "l2approx/folner.hpp"

namespace l2approx {

namespace {

FolnerBox box_for(const PeriodicComplex& complex, std::size_t m) {
  return FolnerBox{m, complex.deck_rank()};
}

void check_degree(const PeriodicComplex& complex, int j) {
  if (j < 0 || j > complex.top_dimension()) {
    throw Error("degree " + std::to_string(j) + " outside 0.." + std::to_string(complex.top_dimension()));
  }
}

double to_double(const mpq_class& q) { return q.get_d(); }

}  // namespace

void require_increasing(std::span<const std::size_t> m_list) {
  if (m_list.empty()) throw Error("m list is empty");
  if (m_list.front() == 0) throw Error("m values must be positive");
  for (std::size_t i = 1; i < m_list.size(); ++i) {
    if (m_list[i] <= m_list[i - 1]) throw Error("m list must be strictly increasing");
  }
}

SpectrumSummary piece_spectrum(const PeriodicComplex& complex, int j, BoundaryCondition bc,
                               std::size_t m, const SpectrumOptions& options) {
  check_degree(complex, j);
  const FinitePiece piece = build_piece(complex, box_for(complex, m));
  return spectrum(assemble(piece, complex, j, bc), options);
}

// ---------------------------------------------------------------------------

ConvergenceReport betti_convergence(const PeriodicComplex& complex, int j, BoundaryCondition bc,
                                    std::span<const std::size_t> m_list, std::size_t oracle_grid,
                                    const AnalysisOptions& options) {
  require_increasing(m_list);
  check_degree(complex, j);
  ConvergenceReport report;
  report.j = j;
  report.bc = bc;
  report.tolerance = options.betti_tolerance;

  OracleOptions oracle = options.oracle;
  oracle.grid_size = oracle_grid;
  const LaplacianFamily family = laplacians(complex);
  const VNDensity vn(family.laplacians.at(static_cast<std::size_t>(j)), oracle);
  report.oracle_betti = vn.betti();
  report.oracle_error = vn.betti_error();

  for (std::size_t m : m_list) {
    const FinitePiece piece = build_piece(complex, box_for(complex, m));
    ConvergenceRow row;
    row.m = m;
    row.translates = piece.translate_count();
    row.betti = finite_betti(piece, complex, j, bc);
    row.F0 = static_cast<double>(row.betti) / static_cast<double>(row.translates);
    row.target = report.oracle_betti;
    row.residual = std::abs(row.F0 - row.target);
    report.rows.push_back(row);
  }
  report.pass = report.rows.back().residual <= report.tolerance;
  return report;
}

// ---------------------------------------------------------------------------

std::size_t TailBoundLedger::violations() const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [](const TailBoundEntry& e) { return !e.ok; }));
}

TailBoundLedger tail_bound_check(const SpectrumSummary& summary, double K2, double a,
                                 std::span<const double> lambdas, std::size_t m) {
  if (!(K2 >= 1.0)) throw Error("K^2 must be at least 1");
  TailBoundLedger ledger;
  const double F0 = summary.F(0.0);
  for (double lambda : lambdas) {
    if (!(lambda > 0.0 && lambda < 1.0)) {
      throw Error("tail bound needs lambda in (0, 1), got " + std::to_string(lambda));
    }
    TailBoundEntry e;
    e.m = m;
    e.lambda = lambda;
    e.lhs = summary.F(lambda) - F0;
    e.rhs = -a * std::log(K2) / std::log(lambda);
    e.slack = e.rhs - e.lhs;
    e.ok = e.slack >= 0.0;
    ledger.entries.push_back(e);
  }
  return ledger;
}

// ---------------------------------------------------------------------------

bool TraceApproxLedger::all_within_bound() const {
  return std::all_of(rows.begin(), rows.end(), [](const TraceApproxRow& r) { return r.ok; });
}

TraceApproxLedger trace_approximation_check(const PeriodicComplex& complex, int j,
                                            std::span<const std::int64_t> coefficients,
                                            std::span<const std::size_t> m_list, BoundaryCondition bc) {
  require_increasing(m_list);
  check_degree(complex, j);
  if (coefficients.empty()) throw Error("polynomial has no coefficients");
  std::size_t degree = coefficients.size() - 1;
  while (degree > 0 && coefficients[degree] == 0) --degree;
  if (degree > 8) throw Error("polynomial degree above 8");

  TraceApproxLedger ledger;
  ledger.j = j;
  ledger.coefficients.assign(coefficients.begin(), coefficients.begin() + static_cast<std::ptrdiff_t>(degree + 1));
  const LaplacianFamily family = laplacians(complex);
  const LaurentMatrix& delta = family.laplacians.at(static_cast<std::size_t>(j));
  ledger.C = family.K2(j);

  mpz_class vn_exact = 0;
  double weight = 0.0;
  for (std::size_t r = 0; r <= degree; ++r) {
    if (coefficients[r] == 0) continue;
    vn_exact += mpz_class(static_cast<long>(coefficients[r])) * vn_trace_power(delta, static_cast<unsigned>(r));
    weight += std::abs(static_cast<double>(coefficients[r])) * std::pow(ledger.C, static_cast<double>(r));
  }

  for (std::size_t m : m_list) {
    const FinitePiece piece = build_piece(complex, box_for(complex, m));
    const FiniteLaplacian lap = assemble(piece, complex, j, bc);
    mpz_class finite_exact = 0;
    for (std::size_t r = 0; r <= degree; ++r) {
      if (coefficients[r] == 0) continue;
      finite_exact += mpz_class(static_cast<long>(coefficients[r])) * trace_power(lap.matrix, static_cast<unsigned>(r));
    }
    TraceApproxRow row;
    row.m = m;
    row.translates = piece.translate_count();
    row.collar = collar_count(piece, degree);
    const mpq_class finite_side(finite_exact, mpz_class(static_cast<unsigned long>(row.translates)));
    const mpq_class difference = abs(mpq_class(vn_exact) - finite_side);
    row.vn_side = vn_exact.get_d();
    row.finite_side = to_double(finite_side);
    row.difference = to_double(difference);
    row.bound = 2.0 * static_cast<double>(row.collar) / static_cast<double>(row.translates) * weight;
    row.ok = row.difference <= row.bound;
    ledger.rows.push_back(row);
  }
  return ledger;
}

// ---------------------------------------------------------------------------

DetClassReport det_class_report(const PeriodicComplex& complex, int j, BoundaryCondition bc,
                                std::span<const std::size_t> m_list, std::size_t oracle_grid,
                                const AnalysisOptions& options) {
  require_increasing(m_list);
  check_degree(complex, j);
  DetClassReport report;
  report.j = j;
  report.bc = bc;
  const LaplacianFamily family = laplacians(complex);
  report.K2 = family.K2(j);
  const double log_K2 = std::log(report.K2);

  for (std::size_t m : m_list) {
    const SpectrumSummary s = piece_spectrum(complex, j, bc, m, options.spectrum);
    if (!s.has_eigenvalues()) {
      throw Error("determinant report for m=" + std::to_string(m) + " needs eigenvalues; dimension " +
                  std::to_string(s.dimension()) + " exceeds dense_limit");
    }
    const auto& ev = *s.eigenvalues();
    const double N = static_cast<double>(s.translate_count());
    DetClassRow row;
    row.m = m;
    row.translates = s.translate_count();
    row.dimension = s.dimension();
    row.kernel = s.kernel_dim();
    row.det_prime = s.det_prime_exact();
    const double log_det = *s.log_det_prime();
    row.normalized_log_det = log_det / N;

    const std::size_t nonzero = row.dimension - row.kernel;
    row.integral_closed = static_cast<double>(nonzero) / N * log_K2 - row.normalized_log_det;

    // Step function F_m(lambda) - F_m(0) = i / N on [mu_i, mu_{i+1}), with the
    // positive eigenvalues taken as the top `nonzero` entries.
    double stieltjes = 0.0;
    const std::size_t first = ev.size() - nonzero;
    for (std::size_t i = 1; i <= nonzero; ++i) {
      const double lo = ev[first + i - 1];
      const double hi = i < nonzero ? ev[first + i] : report.K2;
      stieltjes += static_cast<double>(i) / N * std::log(hi / lo);
    }
    row.integral_stieltjes = stieltjes;

    row.integral_bound = log_K2 * (s.F(report.K2) - s.F(0.0));
    row.integral_slack = row.integral_bound - row.integral_closed;
    row.integral_ok = row.integral_slack >= -options.rounding;
    if (row.det_prime) {
      row.det_ok = *row.det_prime >= 1;
    } else {
      row.det_ok = log_det >= -options.rounding * std::max(1.0, N);
    }
    report.det_positive = report.det_positive && row.det_ok;
    report.integral_bound_holds = report.integral_bound_holds && row.integral_ok;
    report.rows.push_back(std::move(row));
  }

  OracleOptions oracle = options.oracle;
  oracle.grid_size = oracle_grid;
  const VNDensity vn(family.laplacians.at(static_cast<std::size_t>(j)), oracle);
  report.oracle_log_det = vn.log_det_prime();
  report.oracle_log_det_error = vn.log_det_prime_error();
  report.oracle_cutoff = options.cutoff_fraction * report.K2;
  report.oracle_integral = vn.spectral_integral(report.K2, report.oracle_cutoff);

  const std::size_t window = std::min(std::max<std::size_t>(options.window, 1), report.rows.size());
  report.window_min_integral = std::numeric_limits<double>::infinity();
  for (std::size_t i = report.rows.size() - window; i < report.rows.size(); ++i) {
    report.window_min_integral = std::min(report.window_min_integral, report.rows[i].integral_closed);
  }
  report.semicontinuity_holds = report.oracle_integral <= report.window_min_integral + options.semicontinuity_tolerance;
  report.oracle_nonnegative = report.oracle_log_det >= -options.det_tolerance;
  return report;
}

// ---------------------------------------------------------------------------

std::vector<GapRow> gap_diagnostic(const PeriodicComplex& complex, int j, BoundaryCondition bc,
                                   std::span<const std::size_t> m_list, double lambda,
                                   const SpectrumOptions& options) {
  if (!(lambda > 0.0)) throw Error("gap diagnostic needs lambda > 0");
  require_increasing(m_list);
  std::vector<GapRow> rows;
  for (std::size_t m : m_list) {
    const SpectrumSummary s = piece_spectrum(complex, j, bc, m, options);
    GapRow row;
    row.m = m;
    row.translates = s.translate_count();
    row.E_lambda = s.E(lambda);
    row.E_zero = s.E(0.0);
    row.g = static_cast<double>(row.E_lambda - row.E_zero) / static_cast<double>(row.translates);
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------

std::vector<SandwichEntry> sandwich_check(std::span<const SpectrumSummary> window,
                                          const VNDensity& oracle, std::span<const double> lambdas,
                                          double epsilon, double tolerance) {
  if (window.empty()) throw Error("sandwich window is empty");
  std::vector<SandwichEntry> out;
  for (double lambda : lambdas) {
    SandwichEntry e;
    e.lambda = lambda;
    e.oracle = oracle.F(lambda);
    e.min_F = std::numeric_limits<double>::infinity();
    e.max_F_shifted = -std::numeric_limits<double>::infinity();
    for (const SpectrumSummary& s : window) {
      e.min_F = std::min(e.min_F, s.F(lambda));
      e.max_F_shifted = std::max(e.max_F_shifted, s.F(lambda + epsilon));
    }
    e.lower_ok = e.min_F <= e.oracle + tolerance;
    e.upper_ok = e.oracle <= e.max_F_shifted + tolerance;
    out.push_back(e);
  }
  return out;
}

}  // namespace l2approx
