#pragma once

// Laplacians of the finite pieces Y_m (absolute and relative cochains) and
// their spectra: exact kernel dimension and characteristic polynomial,
// floating eigenvalues or inertia counts for everything else.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include <gmpxx.h>

#include "l2approx/folner.hpp"
#include "l2approx/inertia.hpp"
#include "l2approx/sparse_int.hpp"

namespace l2approx {

enum class BoundaryCondition { absolute, relative };

std::string_view to_string(BoundaryCondition bc);
BoundaryCondition parse_boundary_condition(std::string_view text);

/// Coboundary d_j^(m) of the finite complex: rows are (j+1)-cells, columns
/// j-cells of Y_m, restricted to interior cells for the relative condition.
SparseIntMatrix finite_coboundary(const FinitePiece& piece, const PeriodicComplex& complex, int j,
                                  BoundaryCondition bc);

struct FiniteLaplacian {
  int degree = 0;
  BoundaryCondition bc = BoundaryCondition::absolute;
  SparseIntMatrix matrix;
  std::size_t translate_count = 1;
  /// Lifted j-cells indexing the rows, in matrix order.
  std::vector<LiftedCell> basis;

  std::size_t dimension() const { return matrix.rows(); }
};

FiniteLaplacian assemble(const FinitePiece& piece, const PeriodicComplex& complex, int j,
                         BoundaryCondition bc);

struct SpectrumOptions {
  std::size_t char_poly_limit = 400;
  std::size_t dense_limit = 4000;
  double zero_split = 1e-8;
  double tol_psd = 1e-9;
  /// Relative slack when comparing floating eigenvalues against lambda.
  double count_slack = 1e-10;
};

class SpectrumSummary {
 public:
  std::size_t dimension() const { return dimension_; }
  std::size_t translate_count() const { return translate_count_; }
  /// dim C^j(Y_m) / N_m.
  double cochain_ratio() const {
    return static_cast<double>(dimension_) / static_cast<double>(translate_count_);
  }

  std::size_t kernel_dim() const { return kernel_dim_; }

  /// Sorted eigenvalues; absent when the inertia backend was used.
  const std::optional<std::vector<double>>& eigenvalues() const { return eigenvalues_; }
  bool has_eigenvalues() const { return eigenvalues_.has_value(); }
  /// Eigenvalues below zero_split (numerically zero); absent without eigenvalues.
  std::optional<std::size_t> numeric_kernel_dim() const { return numeric_kernel_; }

  /// Characteristic polynomial c_0..c_n, when dimension <= char_poly_limit.
  const std::optional<std::vector<mpz_class>>& char_poly() const { return char_poly_; }
  /// Order of vanishing of the characteristic polynomial at 0.
  std::optional<std::size_t> vanishing_order() const;
  /// q_m(0), the lowest nonzero coefficient.
  std::optional<mpz_class> q0() const;
  /// Exact det' = |q_m(0)|, when the characteristic polynomial is known.
  std::optional<mpz_class> det_prime_exact() const;
  /// log det', exact when possible, otherwise from eigenvalues > zero_split.
  std::optional<double> log_det_prime() const;
  /// log det' from floating eigenvalues > zero_split only.
  std::optional<double> log_det_prime_floating() const { return log_det_float_; }

  /// E(lambda) = #{mu <= lambda}; zero counted exactly by kernel_dim.
  std::size_t E(double lambda) const;
  double F(double lambda) const {
    return static_cast<double>(E(lambda)) / static_cast<double>(translate_count_);
  }

  double max_eigenvalue() const;

 private:
  friend SpectrumSummary spectrum(const FiniteLaplacian&, const SpectrumOptions&);

  std::size_t dimension_ = 0;
  std::size_t translate_count_ = 1;
  std::size_t kernel_dim_ = 0;
  std::optional<std::vector<double>> eigenvalues_;
  std::optional<std::size_t> numeric_kernel_;
  std::optional<std::vector<mpz_class>> char_poly_;
  std::optional<double> log_det_float_;
  std::shared_ptr<const InertiaCounter> inertia_;
  double count_slack_ = 1e-10;
};

/// Throws SpectrumError when the eigensolver fails or the spectrum is not
/// positive semidefinite within tol_psd.
SpectrumSummary spectrum(const FiniteLaplacian& laplacian, const SpectrumOptions& options = {});

struct Counts {
  std::size_t E = 0;
  double F = 0.0;
};

Counts counting(const SpectrumSummary& summary, double lambda);

/// Kernel dimension of the assembled Laplacian by exact rank.
std::size_t finite_betti(const FinitePiece& piece, const PeriodicComplex& complex, int j,
                         BoundaryCondition bc);

/// dim ker d_j - rank d_{j-1}, from exact ranks of the finite coboundaries.
std::size_t homological_betti(const FinitePiece& piece, const PeriodicComplex& complex, int j,
                              BoundaryCondition bc);

/// Exact trace of A^k for an integer matrix, k <= 8 recommended.
mpz_class trace_power(const SparseIntMatrix& a, unsigned k);

}  // namespace l2approx
