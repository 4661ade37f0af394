#include "l2approx/vn_oracle.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "l2approx/parallel.hpp"

namespace l2approx {

namespace {

void check_grid(std::size_t grid_size) {
  if (grid_size < 2 || grid_size % 2 != 0) {
    throw Error("oracle grid size must be even and at least 2, got " + std::to_string(grid_size));
  }
}

void check_self_adjoint(const LaurentMatrix& delta) {
  if (!delta.is_square() || !(adjoint(delta) == delta)) {
    throw Error("oracle input must be a self-adjoint group-ring matrix");
  }
}

std::size_t grid_points(std::size_t grid_size, std::size_t rank) {
  std::size_t n = 1;
  for (std::size_t k = 0; k < rank; ++k) n *= grid_size;
  return n;
}

std::vector<double> grid_point(std::size_t index, std::size_t grid_size, std::size_t rank, double offset) {
  std::vector<double> theta(rank);
  for (std::size_t k = rank; k-- > 0;) {
    theta[k] = (static_cast<double>(index % grid_size) + offset) / static_cast<double>(grid_size);
    index /= grid_size;
  }
  return theta;
}

std::vector<double> symbol_eigenvalues(const LaurentMatrix& delta, std::span<const double> theta) {
  const Eigen::MatrixXcd m = evaluate(delta, theta);
  if (m.rows() == 0) return {};
  if (m.rows() == 1) return {m(0, 0).real()};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw SpectrumError("symbol eigensolver did not converge");
  return {solver.eigenvalues().begin(), solver.eigenvalues().end()};
}

double trace_average(const LaurentMatrix& delta, unsigned k, std::size_t grid_size, double offset) {
  const std::size_t rank = delta.rank();
  const std::size_t points = grid_points(grid_size, rank);
  std::vector<double> traces(points, 0.0);
  detail::parallel_for(points, [&](std::size_t i) {
    const auto theta = grid_point(i, grid_size, rank, offset);
    const Eigen::MatrixXcd m = evaluate(delta, theta);
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Identity(m.rows(), m.cols());
    for (unsigned r = 0; r < k; ++r) p = p * m;
    traces[i] = p.trace().real();
  });
  double sum = 0.0;
  for (double t : traces) sum += t;
  return sum / static_cast<double>(points);
}

}  // namespace

TorusSamples::TorusSamples(const LaurentMatrix& delta, std::size_t grid_size, double kernel_tol,
                           bool midpoint_shift)
    : grid_size_(grid_size),
      cell_count_(delta.rows()),
      kernel_tol_(kernel_tol),
      offset_(midpoint_shift ? 0.5 : 0.0) {
  const std::size_t rank = delta.rank();
  point_count_ = grid_points(grid_size, rank);
  std::vector<std::vector<double>> per_point(point_count_);
  detail::parallel_for(point_count_, [&](std::size_t i) {
    per_point[i] = symbol_eigenvalues(delta, grid_point(i, grid_size, rank, offset_));
  });

  pooled_.reserve(point_count_ * cell_count_);
  double log_det = 0.0;
  for (const auto& ev : per_point) {
    double local = 0.0;
    for (double mu : ev) {
      if (mu <= kernel_tol_) {
        ++kernel_total_;
        pooled_.push_back(0.0);
      } else {
        local += std::log(mu);
        pooled_.push_back(mu);
      }
    }
    log_det += local;
  }
  log_det_ = log_det / static_cast<double>(point_count_);
  std::sort(pooled_.begin(), pooled_.end());
}

double TorusSamples::F(double lambda) const {
  if (lambda < 0) return 0.0;
  const double cutoff = lambda + 1e-12 * std::max(1.0, lambda);
  const auto count = static_cast<std::size_t>(std::upper_bound(pooled_.begin(), pooled_.end(), cutoff) -
                                              pooled_.begin());
  return static_cast<double>(count) / static_cast<double>(point_count_);
}

double TorusSamples::betti() const {
  return static_cast<double>(kernel_total_) / static_cast<double>(point_count_);
}

// ---------------------------------------------------------------------------

VNDensity::VNDensity(const LaurentMatrix& delta, const OracleOptions& options)
    : kernel_tol_(options.kernel_tol),
      fine_((check_self_adjoint(delta), check_grid(options.grid_size), delta), options.grid_size,
            options.kernel_tol, options.midpoint_shift),
      coarse_(delta, options.grid_size / 2, options.kernel_tol, options.midpoint_shift) {}

double VNDensity::F_error(double lambda) const { return std::abs(fine_.F(lambda) - coarse_.F(lambda)); }

double VNDensity::betti_error() const { return std::abs(fine_.betti() - coarse_.betti()); }

double VNDensity::log_det_prime_error() const {
  return std::abs(fine_.log_det_prime() - coarse_.log_det_prime());
}

double VNDensity::spectral_integral(double upper, double cutoff) const {
  if (!(cutoff > 0) || !(upper > cutoff)) throw Error("spectral integral needs 0 < cutoff < upper");
  double sum = 0.0;
  for (double mu : fine_.pooled()) {
    if (mu <= kernel_tol_ || mu >= upper) continue;
    sum += std::log(upper / std::max(mu, cutoff));
  }
  return sum / static_cast<double>(fine_.point_count());
}

VNDensity density(const LaurentMatrix& delta, const OracleOptions& options) {
  return VNDensity(delta, options);
}

QuadratureValue fk_determinant(const LaurentMatrix& delta, const OracleOptions& options) {
  const VNDensity vn(delta, options);
  return {vn.log_det_prime(), vn.log_det_prime_error()};
}

QuadratureValue trace_power_quadrature(const LaurentMatrix& delta, unsigned k,
                                       const OracleOptions& options) {
  check_self_adjoint(delta);
  check_grid(options.grid_size);
  const double offset = options.midpoint_shift ? 0.5 : 0.0;
  const double fine = trace_average(delta, k, options.grid_size, offset);
  const double coarse = trace_average(delta, k, options.grid_size / 2, offset);
  return {fine, std::abs(fine - coarse)};
}

std::size_t exact_trace_grid(const LaurentMatrix& delta, unsigned k) {
  const auto span = static_cast<std::size_t>(delta.max_shift_linf());
  std::size_t n = std::max<std::size_t>(4, 4 * k * span);
  if (n % 2 != 0) ++n;
  return n;
}

}  // namespace l2approx
