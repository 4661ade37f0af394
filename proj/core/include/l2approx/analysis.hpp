#pragma once

// Checkable finite renderings of the approximation results: convergence of
// normalised Betti numbers, the logarithmic tail bound, the trace
// approximation with its explicit error bound, the determinant-class
// inequalities, and the gap-at-zero sequence. Every check produces a ledger
// of slacks, emitted on success as well as on failure.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "l2approx/finite_spectra.hpp"
#include "l2approx/periodic_complex.hpp"
#include "l2approx/vn_oracle.hpp"

namespace l2approx {

struct AnalysisOptions {
  SpectrumOptions spectrum;
  OracleOptions oracle;
  /// Number of largest m values standing in for lim sup / lim inf.
  std::size_t window = 3;
  double betti_tolerance = 1e-2;
  double semicontinuity_tolerance = 0.05;
  double det_tolerance = 0.01;
  /// Lower cutoff of the oracle spectral integral, as a fraction of K^2.
  double cutoff_fraction = 1e-6;
  /// Rounding allowance for inequalities that hold with equality in exact
  /// arithmetic (e.g. det' = 1).
  double rounding = 1e-12;
};

/// Spectrum of Delta_j on the piece cut out by the box of side m.
SpectrumSummary piece_spectrum(const PeriodicComplex& complex, int j, BoundaryCondition bc,
                               std::size_t m, const SpectrumOptions& options = {});

/// Throws Error unless the list is nonempty and strictly increasing.
void require_increasing(std::span<const std::size_t> m_list);

// --- Betti convergence ------------------------------------------------------

struct ConvergenceRow {
  std::size_t m = 0;
  std::size_t translates = 0;
  std::size_t betti = 0;
  double F0 = 0.0;
  double target = 0.0;
  double residual = 0.0;
};

struct ConvergenceReport {
  int j = 0;
  BoundaryCondition bc = BoundaryCondition::absolute;
  std::vector<ConvergenceRow> rows;
  double oracle_betti = 0.0;
  double oracle_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

ConvergenceReport betti_convergence(const PeriodicComplex& complex, int j, BoundaryCondition bc,
                                    std::span<const std::size_t> m_list, std::size_t oracle_grid,
                                    const AnalysisOptions& options = {});

// --- Tail bound ---------------------------------------------------------------

struct TailBoundEntry {
  std::size_t m = 0;
  double lambda = 0.0;
  double lhs = 0.0;  ///< F_m(lambda) - F_m(0)
  double rhs = 0.0;  ///< -a log K^2 / log lambda
  double slack = 0.0;
  bool ok = true;
};

struct TailBoundLedger {
  std::vector<TailBoundEntry> entries;
  std::size_t violations() const;
};

/// Every lambda must lie in (0, 1); K2 is K^2 >= 1.
TailBoundLedger tail_bound_check(const SpectrumSummary& summary, double K2, double a,
                                 std::span<const double> lambdas, std::size_t m = 0);

// --- Trace approximation ------------------------------------------------------

struct TraceApproxRow {
  std::size_t m = 0;
  std::size_t translates = 0;
  std::size_t collar = 0;  ///< collar count at delta = deg p
  double vn_side = 0.0;
  double finite_side = 0.0;
  double difference = 0.0;
  double bound = 0.0;
  bool ok = true;
};

struct TraceApproxLedger {
  int j = 0;
  std::vector<std::int64_t> coefficients;
  /// Constant C in the bound 2 (collar / N) sum |a_r| C^r; here K_j^2, which
  /// dominates every diagonal entry of Delta^r and (Delta^(m))^r.
  double C = 0.0;
  std::vector<TraceApproxRow> rows;
  bool all_within_bound() const;
};

/// p(x) = sum_r coefficients[r] x^r, degree <= 8.
TraceApproxLedger trace_approximation_check(const PeriodicComplex& complex, int j,
                                            std::span<const std::int64_t> coefficients,
                                            std::span<const std::size_t> m_list,
                                            BoundaryCondition bc = BoundaryCondition::absolute);

// --- Determinant class -------------------------------------------------------

struct DetClassRow {
  std::size_t m = 0;
  std::size_t translates = 0;
  std::size_t dimension = 0;
  std::size_t kernel = 0;
  std::optional<mpz_class> det_prime;      ///< exact, when the char poly is known
  double normalized_log_det = 0.0;         ///< (1/N) log det'
  double integral_closed = 0.0;            ///< I_m from the closed form
  double integral_stieltjes = 0.0;         ///< I_m summed over the step function
  double integral_bound = 0.0;                    ///< log K^2 (F_m(K^2) - F_m(0))
  double integral_slack = 0.0;
  bool det_ok = true;
  bool integral_ok = true;
};

struct DetClassReport {
  int j = 0;
  BoundaryCondition bc = BoundaryCondition::absolute;
  double K2 = 1.0;
  std::vector<DetClassRow> rows;
  double oracle_log_det = 0.0;
  double oracle_log_det_error = 0.0;
  double oracle_integral = 0.0;
  double oracle_cutoff = 0.0;
  double window_min_integral = 0.0;
  bool det_positive = true;    ///< every det' >= 1
  bool integral_bound_holds = true;
  bool semicontinuity_holds = true;   ///< oracle integral <= window min + tolerance
  bool oracle_nonnegative = true;
  bool determinant_class() const { return det_positive && integral_bound_holds && semicontinuity_holds && oracle_nonnegative; }
};

DetClassReport det_class_report(const PeriodicComplex& complex, int j, BoundaryCondition bc,
                                std::span<const std::size_t> m_list, std::size_t oracle_grid,
                                const AnalysisOptions& options = {});

// --- Gap diagnostic ----------------------------------------------------------

struct GapRow {
  std::size_t m = 0;
  std::size_t translates = 0;
  std::size_t E_lambda = 0;
  std::size_t E_zero = 0;
  double g = 0.0;
};

/// g_m(lambda) = (E_m(lambda) - E_m(0)) / N_m for each m.
std::vector<GapRow> gap_diagnostic(const PeriodicComplex& complex, int j, BoundaryCondition bc,
                                   std::span<const std::size_t> m_list, double lambda,
                                   const SpectrumOptions& options = {});

// --- Sandwich ----------------------------------------------------------------

struct SandwichEntry {
  double lambda = 0.0;
  double oracle = 0.0;
  double min_F = 0.0;          ///< min over the window of F_m(lambda)
  double max_F_shifted = 0.0;  ///< max over the window of F_m(lambda + epsilon)
  bool lower_ok = true;
  bool upper_ok = true;
};

/// min_m F_m(lambda) <= F(lambda) + tol and F(lambda) <= max_m F_m(lambda + eps) + tol.
std::vector<SandwichEntry> sandwich_check(std::span<const SpectrumSummary> window,
                                          const VNDensity& oracle, std::span<const double> lambdas,
                                          double epsilon, double tolerance);

}  // namespace l2approx
