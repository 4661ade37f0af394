#include "l2approx/finite_spectra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "l2approx/exact_linalg.hpp"

namespace l2approx {

std::string_view to_string(BoundaryCondition bc) {
  return bc == BoundaryCondition::absolute ? "absolute" : "relative";
}

BoundaryCondition parse_boundary_condition(std::string_view text) {
  if (text == "absolute") return BoundaryCondition::absolute;
  if (text == "relative") return BoundaryCondition::relative;
  throw Error("unknown boundary condition '" + std::string(text) + "'");
}

namespace {

std::vector<std::size_t> kept_indices(const FinitePiece& piece, int dim, BoundaryCondition bc) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < piece.cell_count(dim); ++i) {
    if (bc == BoundaryCondition::absolute || !piece.on_boundary(dim, i)) keep.push_back(i);
  }
  return keep;
}

double log_abs(const mpz_class& z) {
  long exponent = 0;
  const double mantissa = mpz_get_d_2exp(&exponent, z.get_mpz_t());
  return std::log(std::abs(mantissa)) + static_cast<double>(exponent) * std::log(2.0);
}

}  // namespace

SparseIntMatrix finite_coboundary(const FinitePiece& piece, const PeriodicComplex& complex, int j,
                                  BoundaryCondition bc) {
  const std::size_t rows = piece.cell_count(j + 1);
  const std::size_t cols = piece.cell_count(j);
  std::vector<SparseIntMatrix::Triplet> triplets;
  if (j >= 0 && j + 1 <= piece.top_dimension()) {
    const auto cells = piece.cells(j + 1);
    for (std::size_t r = 0; r < cells.size(); ++r) {
      for (const BoundaryTerm& t : complex.boundary(j + 1, cells[r].base)) {
        const auto col = piece.index_of(j, LiftedCell{t.face, cells[r].shift + t.shift});
        if (!col) throw Error("finite piece is not closed under faces");
        triplets.emplace_back(r, *col, t.coefficient);
      }
    }
  }
  SparseIntMatrix full = SparseIntMatrix::from_triplets(rows, cols, std::move(triplets));
  if (bc == BoundaryCondition::absolute) return full;
  const auto keep_rows = kept_indices(piece, j + 1, bc);
  const auto keep_cols = kept_indices(piece, j, bc);
  return full.submatrix(keep_rows, keep_cols);
}

FiniteLaplacian assemble(const FinitePiece& piece, const PeriodicComplex& complex, int j,
                         BoundaryCondition bc) {
  if (piece.box().rank != complex.deck_rank()) throw DimensionMismatch("piece and complex ranks differ");
  FiniteLaplacian out;
  out.degree = j;
  out.bc = bc;
  out.translate_count = piece.translate_count();
  const auto keep = kept_indices(piece, j, bc);
  for (std::size_t i : keep) out.basis.push_back(piece.cells(j)[i]);

  const SparseIntMatrix down = finite_coboundary(piece, complex, j - 1, bc);  // j-cells x (j-1)-cells
  const SparseIntMatrix up = finite_coboundary(piece, complex, j, bc);        // (j+1)-cells x j-cells
  SparseIntMatrix lap(keep.size(), keep.size());
  if (down.rows() == keep.size() && down.cols() > 0) lap = lap + down * down.transpose();
  if (up.cols() == keep.size() && up.rows() > 0) lap = lap + up.transpose() * up;
  out.matrix = std::move(lap);
  return out;
}

// ---------------------------------------------------------------------------

std::optional<std::size_t> SpectrumSummary::vanishing_order() const {
  if (!char_poly_) return std::nullopt;
  const auto& c = *char_poly_;
  std::size_t r = 0;
  while (r < c.size() && c[r] == 0) ++r;
  return r;
}

std::optional<mpz_class> SpectrumSummary::q0() const {
  const auto r = vanishing_order();
  if (!r) return std::nullopt;
  return (*char_poly_)[*r];
}

std::optional<mpz_class> SpectrumSummary::det_prime_exact() const {
  auto q = q0();
  if (!q) return std::nullopt;
  return mpz_class(abs(*q));
}

std::optional<double> SpectrumSummary::log_det_prime() const {
  if (auto det = det_prime_exact()) return log_abs(*det);
  return log_det_float_;
}

namespace {
constexpr double kPivotFloor = 1e-7;
}  // namespace

std::size_t SpectrumSummary::E(double lambda) const {
  if (lambda < 0) return 0;
  if (lambda == 0) return kernel_dim_;
  const double cutoff = lambda + count_slack_ * std::max(1.0, lambda);
  if (eigenvalues_) {
    const auto& ev = *eigenvalues_;
    const auto first_positive = ev.begin() + static_cast<std::ptrdiff_t>(std::min(kernel_dim_, ev.size()));
    const auto end = std::upper_bound(first_positive, ev.end(), cutoff);
    return kernel_dim_ + static_cast<std::size_t>(end - first_positive);
  }
  // A probe next to a clustered eigenvalue loses the count to pivot growth;
  // move it up through a few decades of slack until the factorisation is well
  // separated from singular.
  InertiaCounter::Probe p = inertia_->probe(cutoff);
  for (double nudge = 10.0; nudge <= 1e3 && p.min_pivot < kPivotFloor; nudge *= 10.0) {
    p = inertia_->probe(lambda + nudge * (cutoff - lambda));
  }
  const std::size_t below = p.below;
  const std::size_t zeros = numeric_kernel_.value_or(kernel_dim_);
  return kernel_dim_ + (below > zeros ? below - zeros : 0);
}

double SpectrumSummary::max_eigenvalue() const {
  if (dimension_ == 0) return 0.0;
  if (eigenvalues_) return eigenvalues_->back();
  double lo = 0.0;
  double hi = 1.0;
  while (inertia_->count_below(hi) < dimension_) hi *= 2.0;
  for (int it = 0; it < 60 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (inertia_->count_below(mid) < dimension_ ? lo : hi) = mid;
  }
  return hi;
}

SpectrumSummary spectrum(const FiniteLaplacian& laplacian, const SpectrumOptions& options) {
  const SparseIntMatrix& a = laplacian.matrix;
  if (!a.is_symmetric()) throw SpectrumError("finite Laplacian is not symmetric");
  SpectrumSummary s;
  s.dimension_ = a.rows();
  s.translate_count_ = laplacian.translate_count;
  s.count_slack_ = options.count_slack;
  s.kernel_dim_ = s.dimension_ - exact_rank(a);

  if (s.dimension_ <= options.dense_limit) {
    std::vector<double> ev;
    if (s.dimension_ > 0) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a.to_dense(), Eigen::EigenvaluesOnly);
      if (solver.info() != Eigen::Success) {
        std::ostringstream os;
        os << "eigensolver did not converge for " << to_string(laplacian.bc) << " Delta_"
           << laplacian.degree << " of dimension " << s.dimension_;
        throw SpectrumError(os.str());
      }
      ev.assign(solver.eigenvalues().begin(), solver.eigenvalues().end());
      std::sort(ev.begin(), ev.end());
    }
    if (!ev.empty() && ev.front() < -options.tol_psd) {
      throw SpectrumError("finite Laplacian has eigenvalue " + std::to_string(ev.front()) +
                          " below -tol_psd");
    }
    std::size_t numeric_zero = 0;
    double log_det = 0.0;
    for (double mu : ev) {
      if (mu <= options.zero_split) {
        ++numeric_zero;
      } else {
        log_det += std::log(mu);
      }
    }
    s.numeric_kernel_ = numeric_zero;
    s.log_det_float_ = log_det;
    s.eigenvalues_ = std::move(ev);
  } else {
    s.inertia_ = std::make_shared<const InertiaCounter>(a);
    if (s.inertia_->count_below(-options.tol_psd) != 0) {
      throw SpectrumError("finite Laplacian has eigenvalues below -tol_psd");
    }
    s.numeric_kernel_ = s.inertia_->count_below(options.zero_split);
  }

  if (s.dimension_ <= options.char_poly_limit) s.char_poly_ = characteristic_polynomial(a);
  return s;
}

Counts counting(const SpectrumSummary& summary, double lambda) {
  Counts c;
  c.E = summary.E(lambda);
  c.F = static_cast<double>(c.E) / static_cast<double>(summary.translate_count());
  return c;
}

std::size_t finite_betti(const FinitePiece& piece, const PeriodicComplex& complex, int j,
                         BoundaryCondition bc) {
  const FiniteLaplacian lap = assemble(piece, complex, j, bc);
  return lap.dimension() - exact_rank(lap.matrix);
}

std::size_t homological_betti(const FinitePiece& piece, const PeriodicComplex& complex, int j,
                              BoundaryCondition bc) {
  const SparseIntMatrix down = finite_coboundary(piece, complex, j - 1, bc);
  const SparseIntMatrix up = finite_coboundary(piece, complex, j, bc);
  const std::size_t dim = up.cols();
  const std::size_t kernel = dim - exact_rank(up);
  return kernel - exact_rank(down);
}

mpz_class trace_power(const SparseIntMatrix& a, unsigned k) {
  if (a.rows() != a.cols()) throw DimensionMismatch("trace of a non-square matrix");
  if (k == 0) return mpz_class(static_cast<unsigned long>(a.rows()));
  SparseIntMatrix left = SparseIntMatrix::identity(a.rows());
  for (unsigned i = 0; i < k / 2; ++i) left = left * a;
  SparseIntMatrix right = SparseIntMatrix::identity(a.rows());
  for (unsigned i = 0; i < k - k / 2; ++i) right = right * a;
  // tr(L R) = sum_ij L_ij R_ji; R^T rows are R columns.
  const SparseIntMatrix rt = right.transpose();
  mpz_class trace = 0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto lc = left.row_cols(i);
    const auto lv = left.row_values(i);
    const auto rc = rt.row_cols(i);
    const auto rv = rt.row_values(i);
    std::size_t p = 0;
    std::size_t q = 0;
    while (p < lc.size() && q < rc.size()) {
      if (lc[p] < rc[q]) {
        ++p;
      } else if (rc[q] < lc[p]) {
        ++q;
      } else {
        trace += mpz_class(static_cast<long>(lv[p])) * static_cast<long>(rv[q]);
        ++p;
        ++q;
      }
    }
  }
  return trace;
}

}  // namespace l2approx
