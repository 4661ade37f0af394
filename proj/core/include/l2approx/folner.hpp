#pragma once

// Box exhaustions of Z^d and the finite subcomplexes Y_m of the cover that
// they cut out.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "l2approx/periodic_complex.hpp"

namespace l2approx {

/// Lambda_m = {0, ..., m-1}^d.
struct FolnerBox {
  std::size_t side = 1;
  std::size_t rank = 1;

  std::size_t translate_count() const;
  bool contains(const Shift& g) const;
  /// All elements in lexicographic order.
  std::vector<Shift> elements() const;
  /// Lexicographic position of an element of the box.
  std::size_t position(const Shift& g) const;
};

/// The lift of a base cell of X to the translate by `shift`.
struct LiftedCell {
  std::size_t base = 0;
  Shift shift;

  // Shift first: cells of one translate are contiguous and neighbouring
  // translates stay close, which keeps assembled matrices banded.
  auto operator<=>(const LiftedCell& other) const {
    if (auto c = shift <=> other.shift; c != 0) return c;
    return base <=> other.base;
  }
  bool operator==(const LiftedCell&) const = default;
};

struct LiftedCellHash {
  std::size_t operator()(const LiftedCell& c) const noexcept;
};

class FinitePiece {
 public:
  FinitePiece(FolnerBox box, std::vector<std::vector<LiftedCell>> cells,
              std::vector<std::vector<bool>> on_boundary, std::vector<Shift> boundary_translates);

  const FolnerBox& box() const { return box_; }
  std::size_t translate_count() const { return box_.translate_count(); }
  int top_dimension() const { return static_cast<int>(cells_.size()) - 1; }

  /// Cells of dimension `dim`, sorted.
  std::span<const LiftedCell> cells(int dim) const;
  std::size_t cell_count(int dim) const { return cells(dim).size(); }
  std::optional<std::size_t> index_of(int dim, const LiftedCell& cell) const;

  bool on_boundary(int dim, std::size_t index) const;
  std::size_t boundary_cell_count(int dim) const;
  std::size_t interior_cell_count(int dim) const { return cell_count(dim) - boundary_cell_count(dim); }

  /// Elements g of the box whose translate's closure meets the boundary.
  std::span<const Shift> boundary_translates() const { return boundary_translates_; }

 private:
  FolnerBox box_;
  std::vector<std::vector<LiftedCell>> cells_;
  std::vector<std::vector<bool>> on_boundary_;
  std::vector<std::unordered_map<LiftedCell, std::size_t, LiftedCellHash>> index_;
  std::vector<Shift> boundary_translates_;
};

/// Face closure of the translates g.F, g in the box, together with the
/// frontier subcomplex: cells of Y_m that are iterated faces of some cell
/// outside Y_m. Throws DimensionMismatch on a rank mismatch.
FinitePiece build_piece(const PeriodicComplex& complex, const FolnerBox& box);

/// Number of g in the box at l1 distance <= delta from a boundary translate.
std::size_t collar_count(const FinitePiece& piece, std::size_t delta);

/// Collar counts for delta = 0..max_delta in one sweep.
std::vector<std::size_t> collar_profile(const FinitePiece& piece, std::size_t max_delta);

struct RegularityRow {
  std::size_t m = 0;
  std::size_t delta = 0;
  std::size_t translates = 0;
  std::size_t collar = 0;
  double ratio = 0.0;
};

std::vector<RegularityRow> regularity_report(const PeriodicComplex& complex,
                                             std::span<const std::size_t> m_values,
                                             std::span<const std::size_t> delta_values);

}  // namespace l2approx
