#include "l2approx/folner.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>
#include <set>

namespace l2approx {

std::size_t FolnerBox::translate_count() const {
  std::size_t n = 1;
  for (std::size_t k = 0; k < rank; ++k) n *= side;
  return n;
}

bool FolnerBox::contains(const Shift& g) const {
  if (g.rank() != rank) return false;
  for (std::size_t k = 0; k < rank; ++k) {
    if (g[k] < 0 || g[k] >= static_cast<std::int64_t>(side)) return false;
  }
  return true;
}

std::vector<Shift> FolnerBox::elements() const {
  std::vector<Shift> out;
  out.reserve(translate_count());
  Shift g(rank);
  if (side == 0) return out;
  while (true) {
    out.push_back(g);
    std::size_t k = rank;
    while (k > 0) {
      --k;
      if (++g[k] < static_cast<std::int64_t>(side)) break;
      g[k] = 0;
      if (k == 0) return out;
    }
  }
}

std::size_t FolnerBox::position(const Shift& g) const {
  std::size_t pos = 0;
  for (std::size_t k = 0; k < rank; ++k) pos = pos * side + static_cast<std::size_t>(g[k]);
  return pos;
}

std::size_t LiftedCellHash::operator()(const LiftedCell& c) const noexcept {
  std::size_t h = std::hash<std::size_t>{}(c.base);
  for (std::size_t k = 0; k < c.shift.rank(); ++k) {
    h ^= std::hash<std::int64_t>{}(c.shift[k]) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

FinitePiece::FinitePiece(FolnerBox box, std::vector<std::vector<LiftedCell>> cells,
                         std::vector<std::vector<bool>> on_boundary,
                         std::vector<Shift> boundary_translates)
    : box_(box),
      cells_(std::move(cells)),
      on_boundary_(std::move(on_boundary)),
      boundary_translates_(std::move(boundary_translates)) {
  index_.resize(cells_.size());
  for (std::size_t d = 0; d < cells_.size(); ++d) {
    index_[d].reserve(cells_[d].size());
    for (std::size_t i = 0; i < cells_[d].size(); ++i) index_[d].emplace(cells_[d][i], i);
  }
}

std::span<const LiftedCell> FinitePiece::cells(int dim) const {
  if (dim < 0 || dim > top_dimension()) return {};
  return cells_[static_cast<std::size_t>(dim)];
}

std::optional<std::size_t> FinitePiece::index_of(int dim, const LiftedCell& cell) const {
  if (dim < 0 || dim > top_dimension()) return std::nullopt;
  const auto& idx = index_[static_cast<std::size_t>(dim)];
  auto it = idx.find(cell);
  if (it == idx.end()) return std::nullopt;
  return it->second;
}

bool FinitePiece::on_boundary(int dim, std::size_t index) const {
  return on_boundary_.at(static_cast<std::size_t>(dim)).at(index);
}

std::size_t FinitePiece::boundary_cell_count(int dim) const {
  if (dim < 0 || dim > top_dimension()) return 0;
  const auto& flags = on_boundary_[static_cast<std::size_t>(dim)];
  return static_cast<std::size_t>(std::count(flags.begin(), flags.end(), true));
}

namespace {

// Closure of the fundamental domain at the origin, per dimension.
std::vector<std::set<LiftedCell>> fundamental_closure(const PeriodicComplex& complex) {
  const int top = complex.top_dimension();
  std::vector<std::set<LiftedCell>> closure(static_cast<std::size_t>(top + 1));
  for (int j = top; j >= 0; --j) {
    auto& here = closure[static_cast<std::size_t>(j)];
    for (std::size_t c = 0; c < complex.cell_count(j); ++c) {
      here.insert(LiftedCell{c, Shift(complex.deck_rank())});
    }
    if (j == 0) break;
    auto& below = closure[static_cast<std::size_t>(j - 1)];
    for (const LiftedCell& cell : here) {
      for (const BoundaryTerm& t : complex.boundary(j, cell.base)) {
        below.insert(LiftedCell{t.face, cell.shift + t.shift});
      }
    }
  }
  return closure;
}

}  // namespace

FinitePiece build_piece(const PeriodicComplex& complex, const FolnerBox& box) {
  if (box.rank != complex.deck_rank()) {
    throw DimensionMismatch("box rank " + std::to_string(box.rank) + " differs from deck rank " +
                            std::to_string(complex.deck_rank()));
  }
  if (box.side == 0) throw DimensionMismatch("box side must be positive");
  const int top = complex.top_dimension();
  const auto dims = static_cast<std::size_t>(top + 1);
  const auto closure = fundamental_closure(complex);
  const std::vector<Shift> elements = box.elements();

  std::vector<std::vector<LiftedCell>> cells(dims);
  for (std::size_t j = 0; j < dims; ++j) {
    std::vector<LiftedCell>& out = cells[j];
    out.reserve(elements.size() * closure[j].size());
    for (const Shift& g : elements) {
      for (const LiftedCell& c : closure[j]) out.push_back(LiftedCell{c.base, g + c.shift});
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  }

  std::vector<std::unordered_map<LiftedCell, std::size_t, LiftedCellHash>> index(dims);
  for (std::size_t j = 0; j < dims; ++j) {
    index[j].reserve(cells[j].size());
    for (std::size_t i = 0; i < cells[j].size(); ++i) index[j].emplace(cells[j][i], i);
  }

  // cofaces[j][f]: (cell e of dim j+1, shift s) with f at s in the boundary of e.
  std::vector<std::vector<std::vector<std::pair<std::size_t, Shift>>>> cofaces(dims);
  for (std::size_t j = 0; j < dims; ++j) cofaces[j].resize(complex.cell_count(static_cast<int>(j)));
  for (int j = 1; j <= top; ++j) {
    for (std::size_t e = 0; e < complex.cell_count(j); ++e) {
      for (const BoundaryTerm& t : complex.boundary(j, e)) {
        cofaces[static_cast<std::size_t>(j - 1)][t.face].emplace_back(e, t.shift);
      }
    }
  }

  // A cell is on the frontier if some coface lies outside Y_m; the frontier
  // is then closed under taking faces.
  std::vector<std::vector<bool>> flags(dims);
  for (std::size_t j = 0; j < dims; ++j) flags[j].assign(cells[j].size(), false);
  for (std::size_t j = 0; j + 1 < dims; ++j) {
    for (std::size_t i = 0; i < cells[j].size(); ++i) {
      const LiftedCell& cell = cells[j][i];
      for (const auto& [e, s] : cofaces[j][cell.base]) {
        if (!index[j + 1].contains(LiftedCell{e, cell.shift - s})) {
          flags[j][i] = true;
          break;
        }
      }
    }
  }
  for (std::size_t j = dims; j-- > 1;) {
    for (std::size_t i = 0; i < cells[j].size(); ++i) {
      if (!flags[j][i]) continue;
      const LiftedCell& cell = cells[j][i];
      for (const BoundaryTerm& t : complex.boundary(static_cast<int>(j), cell.base)) {
        flags[j - 1][index[j - 1].at(LiftedCell{t.face, cell.shift + t.shift})] = true;
      }
    }
  }

  std::vector<Shift> boundary_translates;
  for (const Shift& g : elements) {
    bool touches = false;
    for (std::size_t j = 0; j < dims && !touches; ++j) {
      for (const LiftedCell& c : closure[j]) {
        if (flags[j][index[j].at(LiftedCell{c.base, g + c.shift})]) {
          touches = true;
          break;
        }
      }
    }
    if (touches) boundary_translates.push_back(g);
  }

  return FinitePiece(box, std::move(cells), std::move(flags), std::move(boundary_translates));
}

std::vector<std::size_t> collar_profile(const FinitePiece& piece, std::size_t max_delta) {
  const FolnerBox& box = piece.box();
  const std::size_t n = box.translate_count();
  constexpr std::size_t kUnreached = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> dist(n, kUnreached);
  std::deque<Shift> queue;
  for (const Shift& g : piece.boundary_translates()) {
    dist[box.position(g)] = 0;
    queue.push_back(g);
  }
  // Breadth-first search in the word metric of the standard generators.
  while (!queue.empty()) {
    const Shift g = queue.front();
    queue.pop_front();
    const std::size_t here = dist[box.position(g)];
    for (std::size_t k = 0; k < box.rank; ++k) {
      for (int step : {-1, 1}) {
        Shift h = g;
        h[k] += step;
        if (!box.contains(h)) continue;
        const std::size_t p = box.position(h);
        if (dist[p] != kUnreached) continue;
        dist[p] = here + 1;
        queue.push_back(h);
      }
    }
  }
  std::vector<std::size_t> profile(max_delta + 1, 0);
  for (std::size_t d : dist) {
    if (d == kUnreached) continue;
    for (std::size_t delta = d; delta <= max_delta; ++delta) ++profile[delta];
  }
  return profile;
}

std::size_t collar_count(const FinitePiece& piece, std::size_t delta) {
  return collar_profile(piece, delta).back();
}

std::vector<RegularityRow> regularity_report(const PeriodicComplex& complex,
                                             std::span<const std::size_t> m_values,
                                             std::span<const std::size_t> delta_values) {
  if (m_values.empty() || delta_values.empty()) {
    throw Error("regularity report needs nonempty m and delta lists");
  }
  const std::size_t max_delta = *std::max_element(delta_values.begin(), delta_values.end());
  std::vector<RegularityRow> rows;
  for (std::size_t m : m_values) {
    const FinitePiece piece = build_piece(complex, FolnerBox{m, complex.deck_rank()});
    const auto profile = collar_profile(piece, max_delta);
    for (std::size_t delta : delta_values) {
      RegularityRow row;
      row.m = m;
      row.delta = delta;
      row.translates = piece.translate_count();
      row.collar = profile[delta];
      row.ratio = static_cast<double>(row.collar) / static_cast<double>(row.translates);
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace l2approx
