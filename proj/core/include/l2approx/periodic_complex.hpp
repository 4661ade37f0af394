#pragma once

// A finite cell complex X with a free Z^d deck action on its cover Y,
// presented by per-cell boundary lists whose faces carry deck shifts.
//
// Convention: a boundary term (f, s, c) of the cell e means that the lift of
// e at g has the lift of f at g + s as a face with incidence c. The
// coboundary d_j then has group-ring entry sum c t^s at (e, f), acting as
// (d u)(e, g) = sum c u(f, g + s).

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "l2approx/laurent.hpp"

namespace l2approx {

struct Cell {
  std::string id;
  int dim = 0;
};

struct BoundaryTerm {
  std::size_t face = 0;  ///< index among cells of dimension dim - 1
  Shift shift;
  std::int64_t coefficient = 0;
};

struct CellRef {
  int dim = 0;
  std::size_t index = 0;
};

class PeriodicComplex {
 public:
  PeriodicComplex(std::size_t deck_rank, std::vector<std::vector<Cell>> cells,
                  std::vector<std::vector<std::vector<BoundaryTerm>>> boundary);

  std::size_t deck_rank() const { return deck_rank_; }
  /// Highest dimension carrying at least one cell, or -1 for the empty complex.
  int top_dimension() const { return static_cast<int>(cells_.size()) - 1; }
  std::size_t cell_count(int dim) const;
  std::vector<std::size_t> cell_counts() const;
  std::span<const Cell> cells(int dim) const;
  std::span<const BoundaryTerm> boundary(int dim, std::size_t index) const;
  std::optional<CellRef> find(std::string_view id) const;

 private:
  std::size_t deck_rank_;
  std::vector<std::vector<Cell>> cells_;
  std::vector<std::vector<std::vector<BoundaryTerm>>> boundary_;
  std::unordered_map<std::string, CellRef> index_;
};

/// Parses and validates a periodic-complex JSON document. Throws ParseError
/// for malformed input or dangling faces, ChainComplexError when the
/// composite boundary does not vanish.
PeriodicComplex load_complex(std::string_view document);
PeriodicComplex load_complex_file(const std::filesystem::path& path);

/// Group-ring matrix of d_j: rows are (j+1)-cells, columns are j-cells.
/// Out-of-range j gives an empty matrix of the correct shape.
LaurentMatrix coboundary(const PeriodicComplex& complex, int j);

struct LaplacianFamily {
  std::vector<LaurentMatrix> coboundaries;  ///< d_j for j = 0..top
  std::vector<LaurentMatrix> laplacians;    ///< Delta_j for j = 0..top
  /// Largest absolute coefficient of any entry of Delta_j.
  std::vector<mpz_class> entry_bound;
  /// Largest number of lifted j-cells within one step of a j-cell.
  std::vector<std::size_t> local_count;
  /// Row-sum bound K_j^2 >= ||Delta_j||, clamped below by 1.
  std::vector<std::int64_t> norm_bound_sq;

  double K2(int j) const { return static_cast<double>(norm_bound_sq.at(static_cast<std::size_t>(j))); }
  /// The product C_j * b_j, the cruder norm bound.
  mpz_class product_bound(int j) const;
};

LaplacianFamily laplacians(const PeriodicComplex& complex);

/// Non-fatal observations, e.g. 1-cells whose incidence numbers do not sum to
/// zero (the complex then has no augmentation compatible with d_0).
std::vector<std::string> warnings(const PeriodicComplex& complex);

/// Summary for `validate`: "dims: [1,2,1]; K_0^2=4; ..." style lines.
std::string describe(const PeriodicComplex& complex, const LaplacianFamily& family);

}  // namespace l2approx
