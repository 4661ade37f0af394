#include "l2approx/periodic_complex.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace l2approx {

namespace {

using nlohmann::json;

std::int64_t require_integer(const json& value, const std::string& what) {
  if (!value.is_number_integer()) throw ParseError(what + " must be an integer");
  return value.get<std::int64_t>();
}

}  // namespace

PeriodicComplex::PeriodicComplex(std::size_t deck_rank, std::vector<std::vector<Cell>> cells,
                                 std::vector<std::vector<std::vector<BoundaryTerm>>> boundary)
    : deck_rank_(deck_rank), cells_(std::move(cells)), boundary_(std::move(boundary)) {
  if (boundary_.size() != cells_.size()) throw Error("boundary table does not match cell table");
  for (std::size_t d = 0; d < cells_.size(); ++d) {
    if (boundary_[d].size() != cells_[d].size()) {
      throw Error("boundary table does not match cell table in dimension " + std::to_string(d));
    }
    for (std::size_t i = 0; i < cells_[d].size(); ++i) {
      index_.emplace(cells_[d][i].id, CellRef{static_cast<int>(d), i});
    }
  }
}

std::size_t PeriodicComplex::cell_count(int dim) const {
  if (dim < 0 || dim > top_dimension()) return 0;
  return cells_[static_cast<std::size_t>(dim)].size();
}

std::vector<std::size_t> PeriodicComplex::cell_counts() const {
  std::vector<std::size_t> out;
  for (const auto& c : cells_) out.push_back(c.size());
  return out;
}

std::span<const Cell> PeriodicComplex::cells(int dim) const {
  if (dim < 0 || dim > top_dimension()) return {};
  return cells_[static_cast<std::size_t>(dim)];
}

std::span<const BoundaryTerm> PeriodicComplex::boundary(int dim, std::size_t index) const {
  if (dim < 0 || dim > top_dimension()) return {};
  return boundary_[static_cast<std::size_t>(dim)].at(index);
}

std::optional<CellRef> PeriodicComplex::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------------------

PeriodicComplex load_complex(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("document must be a JSON object");
  if (!doc.contains("deck_rank")) throw ParseError("missing field 'deck_rank'");
  const std::int64_t rank = require_integer(doc["deck_rank"], "deck_rank");
  if (rank < 1 || rank > static_cast<std::int64_t>(kMaxDeckRank)) {
    throw ParseError("deck_rank must lie in [1, " + std::to_string(kMaxDeckRank) + "]");
  }
  const auto d = static_cast<std::size_t>(rank);

  if (!doc.contains("cells") || !doc["cells"].is_array()) {
    throw ParseError("missing array field 'cells'");
  }
  std::vector<std::vector<Cell>> cells;
  std::unordered_map<std::string, CellRef> index;
  for (const auto& entry : doc["cells"]) {
    if (!entry.is_object() || !entry.contains("id") || !entry["id"].is_string() ||
        !entry.contains("dim")) {
      throw ParseError("each cell needs a string 'id' and an integer 'dim'");
    }
    const std::string id = entry["id"].get<std::string>();
    const std::int64_t dim = require_integer(entry["dim"], "dim of cell '" + id + "'");
    if (dim < 0) throw ParseError("cell '" + id + "' has negative dimension");
    const auto ud = static_cast<std::size_t>(dim);
    if (cells.size() <= ud) cells.resize(ud + 1);
    if (index.contains(id)) throw ParseError("duplicate cell id '" + id + "'");
    index.emplace(id, CellRef{static_cast<int>(dim), cells[ud].size()});
    cells[ud].push_back(Cell{id, static_cast<int>(dim)});
  }

  std::vector<std::vector<std::vector<BoundaryTerm>>> boundary(cells.size());
  for (std::size_t k = 0; k < cells.size(); ++k) boundary[k].resize(cells[k].size());

  if (doc.contains("boundary")) {
    const json& bmap = doc["boundary"];
    if (!bmap.is_object()) throw ParseError("'boundary' must be an object keyed by cell id");
    for (const auto& [id, terms] : bmap.items()) {
      auto it = index.find(id);
      if (it == index.end()) throw ParseError("boundary given for unknown cell '" + id + "'");
      const CellRef cell = it->second;
      if (!terms.is_array()) throw ParseError("boundary of '" + id + "' must be an array");
      if (cell.dim == 0 && !terms.empty()) {
        throw ParseError("0-cell '" + id + "' must have an empty boundary");
      }
      auto& out = boundary[static_cast<std::size_t>(cell.dim)][cell.index];
      for (const auto& term : terms) {
        if (!term.is_array() || term.size() != 3 || !term[0].is_string() || !term[1].is_array()) {
          throw ParseError("boundary term of '" + id + "' must be [face id, shift, coefficient]");
        }
        const std::string face_id = term[0].get<std::string>();
        auto fit = index.find(face_id);
        if (fit == index.end()) {
          throw ParseError("cell '" + id + "' references missing face '" + face_id + "'");
        }
        if (fit->second.dim != cell.dim - 1) {
          throw ParseError("face '" + face_id + "' of '" + id + "' has dimension " +
                           std::to_string(fit->second.dim) + ", expected " +
                           std::to_string(cell.dim - 1));
        }
        if (term[1].size() != d) {
          throw ParseError("shift in boundary of '" + id + "' must have " + std::to_string(d) +
                           " entries");
        }
        Shift shift(d);
        for (std::size_t k = 0; k < d; ++k) {
          shift[k] = require_integer(term[1][k], "shift coordinate in boundary of '" + id + "'");
        }
        const std::int64_t coef =
            require_integer(term[2], "coefficient in boundary of '" + id + "'");
        out.push_back(BoundaryTerm{fit->second.index, shift, coef});
      }
    }
  }

  PeriodicComplex complex(d, std::move(cells), std::move(boundary));

  for (int j = 1; j < complex.top_dimension(); ++j) {
    const LaurentMatrix composite = multiply(coboundary(complex, j), coboundary(complex, j - 1));
    if (!composite.is_zero()) {
      const auto& [rc, p] = *composite.entries().begin();
      throw ChainComplexError("boundary of boundary of cell '" + complex.cells(j + 1)[rc.first].id +
                              "' is nonzero on face '" + complex.cells(j - 1)[rc.second].id +
                              "': " + p.to_string());
    }
  }
  return complex;
}

PeriodicComplex load_complex_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_complex(buffer.str());
}

LaurentMatrix coboundary(const PeriodicComplex& complex, int j) {
  const std::size_t d = complex.deck_rank();
  LaurentMatrix out(complex.cell_count(j + 1), complex.cell_count(j), d);
  if (j < 0 || j + 1 > complex.top_dimension()) return out;
  for (std::size_t e = 0; e < complex.cell_count(j + 1); ++e) {
    for (const BoundaryTerm& t : complex.boundary(j + 1, e)) {
      out.add_to(e, t.face, LaurentPoly::monomial(t.shift, t.coefficient));
    }
  }
  return out;
}

mpz_class LaplacianFamily::product_bound(int j) const {
  const auto k = static_cast<std::size_t>(j);
  return entry_bound.at(k) * static_cast<unsigned long>(local_count.at(k));
}

namespace {

// Lifted j-cells sharing a face or a coface with the j-cell (j, sigma) at the
// origin, counted without regard to cancellation.
std::size_t neighbourhood_size(const PeriodicComplex& complex, int j, std::size_t sigma,
                               const std::vector<std::vector<std::vector<std::pair<std::size_t, Shift>>>>& cofaces) {
  std::set<std::pair<std::size_t, Shift>> seen;
  seen.emplace(sigma, Shift(complex.deck_rank()));
  if (j >= 1) {
    for (const BoundaryTerm& t : complex.boundary(j, sigma)) {
      for (const auto& [tau, s] : cofaces[static_cast<std::size_t>(j - 1)][t.face]) {
        seen.emplace(tau, t.shift - s);
      }
    }
  }
  if (j + 1 <= complex.top_dimension()) {
    for (const auto& [rho, s_rho] : cofaces[static_cast<std::size_t>(j)][sigma]) {
      const Shift at = -s_rho;
      for (const BoundaryTerm& t : complex.boundary(j + 1, rho)) seen.emplace(t.face, at + t.shift);
    }
  }
  return seen.size();
}

}  // namespace

LaplacianFamily laplacians(const PeriodicComplex& complex) {
  const int top = complex.top_dimension();
  const std::size_t d = complex.deck_rank();
  LaplacianFamily family;

  // cofaces[j][f] lists (cell of dim j+1, shift at which f appears in it).
  std::vector<std::vector<std::vector<std::pair<std::size_t, Shift>>>> cofaces(
      static_cast<std::size_t>(std::max(top, 0) + 1));
  for (int j = 0; j <= top; ++j) cofaces[static_cast<std::size_t>(j)].resize(complex.cell_count(j));
  for (int j = 1; j <= top; ++j) {
    for (std::size_t e = 0; e < complex.cell_count(j); ++e) {
      for (const BoundaryTerm& t : complex.boundary(j, e)) {
        cofaces[static_cast<std::size_t>(j - 1)][t.face].emplace_back(e, t.shift);
      }
    }
  }

  for (int j = 0; j <= top; ++j) family.coboundaries.push_back(coboundary(complex, j));
  for (int j = 0; j <= top; ++j) {
    const std::size_t n = complex.cell_count(j);
    LaurentMatrix delta(n, n, d);
    if (j >= 1) {
      const LaurentMatrix& down = family.coboundaries[static_cast<std::size_t>(j - 1)];
      delta = delta + multiply(down, adjoint(down));
    }
    const LaurentMatrix& up = family.coboundaries[static_cast<std::size_t>(j)];
    delta = delta + multiply(adjoint(up), up);

    mpz_class entry_bound = 0;
    std::vector<mpz_class> row_sum(n, 0);
    for (const auto& [ij, p] : delta.entries()) {
      entry_bound = std::max(entry_bound, p.max_abs_coefficient());
      row_sum[ij.first] += p.abs_coefficient_sum();
    }
    mpz_class k2 = 1;
    for (const auto& s : row_sum) k2 = std::max(k2, s);
    if (!k2.fits_slong_p()) throw Error("norm bound overflows 64 bits");

    std::size_t local = 0;
    for (std::size_t s = 0; s < n; ++s) {
      local = std::max(local, neighbourhood_size(complex, j, s, cofaces));
    }

    family.laplacians.push_back(std::move(delta));
    family.entry_bound.push_back(entry_bound);
    family.local_count.push_back(local);
    family.norm_bound_sq.push_back(k2.get_si());
  }
  return family;
}

std::vector<std::string> warnings(const PeriodicComplex& complex) {
  std::vector<std::string> out;
  for (std::size_t e = 0; e < complex.cell_count(1); ++e) {
    std::int64_t sum = 0;
    for (const BoundaryTerm& t : complex.boundary(1, e)) sum += t.coefficient;
    if (sum != 0) {
      out.push_back("1-cell '" + complex.cells(1)[e].id + "' has incidence sum " +
                    std::to_string(sum) + " (nonzero augmentation)");
    }
  }
  return out;
}

std::string describe(const PeriodicComplex& complex, const LaplacianFamily& family) {
  std::ostringstream os;
  os << "dims: [";
  const auto counts = complex.cell_counts();
  for (std::size_t i = 0; i < counts.size(); ++i) os << (i ? "," : "") << counts[i];
  os << "]";
  if (!family.norm_bound_sq.empty()) os << "; K_0²=" << family.norm_bound_sq[0];
  os << "; chain complex OK\n";
  for (const auto& w : warnings(complex)) os << "warning: " << w << "\n";
  os << "deck_rank: " << complex.deck_rank() << "\n";
  for (std::size_t j = 0; j < family.norm_bound_sq.size(); ++j) {
    os << "j=" << j << ": C_j=" << family.entry_bound[j].get_str()
       << " b_j=" << family.local_count[j] << " C_j*b_j=" << family.product_bound(static_cast<int>(j)).get_str()
       << " K_j²=" << family.norm_bound_sq[j] << "\n";
  }
  return os.str();
}

}  // namespace l2approx
