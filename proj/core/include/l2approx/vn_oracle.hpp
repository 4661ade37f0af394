#pragma once

// Von Neumann quantities of a Z^d-periodic Laplacian computed on the Fourier
// side: for pi = Z^d the trace Tr_{U(pi)} of a function of Delta is the
// torus average of the ordinary trace of that function of the symbol
// Delta(theta). Every quantity comes with the difference between the
// grid_size and grid_size/2 results as an error estimate.

#include <cstddef>
#include <span>
#include <vector>

#include "l2approx/laurent.hpp"

namespace l2approx {

struct OracleOptions {
  std::size_t grid_size = 256;  ///< points per torus axis; even, >= 2
  double kernel_tol = 1e-7;    ///< symbol eigenvalues at or below count as zero
  /// Sample at (i + 1/2) / N rather than i / N. The offset avoids the
  /// measure-zero set where the symbol's kernel jumps.
  bool midpoint_shift = true;
};

/// Spectral data of the symbol on one uniform grid.
class TorusSamples {
 public:
  TorusSamples(const LaurentMatrix& delta, std::size_t grid_size, double kernel_tol, bool midpoint_shift);

  std::size_t grid_size() const { return grid_size_; }
  std::size_t point_count() const { return point_count_; }
  std::size_t cell_count() const { return cell_count_; }
  double offset() const { return offset_; }

  /// Fraction-weighted count: average over the grid of #{mu <= lambda},
  /// where mu <= kernel_tol counts as zero.
  double F(double lambda) const;
  /// Average numeric kernel dimension.
  double betti() const;
  /// Average of sum log mu over mu > kernel_tol.
  double log_det_prime() const { return log_det_; }
  /// Pooled eigenvalues of all grid points, ascending.
  std::span<const double> pooled() const { return pooled_; }

 private:
  std::size_t grid_size_;
  std::size_t point_count_ = 0;
  std::size_t cell_count_;
  double kernel_tol_;
  double offset_;
  double log_det_ = 0.0;
  std::size_t kernel_total_ = 0;
  std::vector<double> pooled_;
};

class VNDensity {
 public:
  VNDensity(const LaurentMatrix& delta, const OracleOptions& options);

  std::size_t grid_size() const { return fine_.grid_size(); }
  std::size_t cell_count() const { return fine_.cell_count(); }
  double kernel_tol() const { return kernel_tol_; }
  /// Grid offset (in units of the torus period) used for sampling.
  double grid_offset() const { return fine_.offset(); }

  double F(double lambda) const { return fine_.F(lambda); }
  double F_error(double lambda) const;
  double betti() const { return fine_.betti(); }
  double betti_error() const;
  double log_det_prime() const { return fine_.log_det_prime(); }
  double log_det_prime_error() const;

  /// int_{cutoff}^{upper} (F(lambda) - F(0)) / lambda d lambda, integrating
  /// the sampled step function exactly on the log scale:
  /// mean over samples of sum_{mu > kernel_tol} log(upper / max(mu, cutoff)).
  double spectral_integral(double upper, double cutoff) const;

  const TorusSamples& fine() const { return fine_; }
  const TorusSamples& coarse() const { return coarse_; }

 private:
  double kernel_tol_;
  TorusSamples fine_;
  TorusSamples coarse_;
};

struct QuadratureValue {
  double value = 0.0;
  double error_estimate = 0.0;
};

/// Throws Error if delta is not self-adjoint or the grid is invalid.
VNDensity density(const LaurentMatrix& delta, const OracleOptions& options = {});

/// log det'_pi, the Fuglede-Kadison determinant restricted to ker^perp.
QuadratureValue fk_determinant(const LaurentMatrix& delta, const OracleOptions& options = {});

/// Torus average of trace(Delta(theta)^k).
QuadratureValue trace_power_quadrature(const LaurentMatrix& delta, unsigned k,
                                       const OracleOptions& options = {});

/// Smallest even grid on which trace_power_quadrature is exact for k:
/// max(4, 4 * k * span), span the largest |shift| coordinate in delta.
std::size_t exact_trace_grid(const LaurentMatrix& delta, unsigned k);

}  // namespace l2approx
