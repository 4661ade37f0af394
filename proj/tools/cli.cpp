#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "l2approx/folner.hpp"
#include "l2approx/sparse_int.hpp"

namespace l2approx::cli {

namespace {

using nlohmann::ordered_json;

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    out.emplace_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_integer(std::string_view raw, std::string_view what) {
  const std::string s = trim(raw);
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw UsageError("invalid " + std::string(what) + " '" + s + "'");
  }
  return value;
}

double parse_real(std::string_view raw, std::string_view what) {
  const std::string s = trim(raw);
  std::istringstream in(s);
  in.imbue(std::locale::classic());
  double value = 0.0;
  in >> value;
  if (s.empty() || in.fail() || !in.eof() || !std::isfinite(value)) {
    throw UsageError("invalid " + std::string(what) + " '" + s + "'");
  }
  return value;
}

std::string bc_name(BoundaryCondition bc) { return std::string(to_string(bc)); }

std::string verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

class CsvFile {
 public:
  CsvFile(const std::filesystem::path& path, std::vector<std::string> header)
      : out_(path, std::ios::binary), columns_(header.size()) {
    if (!out_) throw Error("cannot write " + path.string());
    row(header);
  }

  void row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw Error("CSV row width does not match its header");
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << "\n";
  }

 private:
  std::ofstream out_;
  std::size_t columns_;
};

void write_json(const std::filesystem::path& path, const ordered_json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << doc.dump(2) << "\n";
}

std::string u(std::size_t v) { return std::to_string(v); }

struct Loaded {
  PeriodicComplex complex;
  LaplacianFamily family;
};

Loaded load(const RunConfig& config) {
  PeriodicComplex complex = load_complex_file(config.input);
  LaplacianFamily family = laplacians(complex);
  return {std::move(complex), std::move(family)};
}

std::vector<int> degrees_of(const RunConfig& config, const PeriodicComplex& complex) {
  std::vector<int> out;
  if (!config.degrees) {
    for (int j = 0; j <= complex.top_dimension(); ++j) out.push_back(j);
    return out;
  }
  for (int j : *config.degrees) {
    if (j < 0 || j > complex.top_dimension()) {
      throw UsageError("degree " + std::to_string(j) + " outside 0.." + std::to_string(complex.top_dimension()));
    }
    out.push_back(j);
  }
  return out;
}

ordered_json header_json(const RunConfig& config, const std::string& command) {
  ordered_json doc;
  doc["command"] = command;
  doc["input"] = config.input.filename().string();
  doc["m_list"] = config.m_list;
  doc["seed"] = config.seed;
  return doc;
}

ordered_json oracle_json(const RunConfig& config, const AnalysisOptions& options) {
  return ordered_json{{"grid_size", config.oracle_grid},
                      {"grid_offset", options.oracle.midpoint_shift ? 0.5 : 0.0},
                      {"kernel_tol", options.oracle.kernel_tol}};
}

std::filesystem::path prepare_out(const RunConfig& config) {
  std::filesystem::create_directories(config.out_dir);
  return config.out_dir;
}

std::string stem(const std::string& command, int j, BoundaryCondition bc) {
  return command + "_j" + std::to_string(j) + "_" + bc_name(bc);
}

}  // namespace

// ---------------------------------------------------------------------------

const std::vector<std::string>& tolerance_names() {
  static const std::vector<std::string> names{"betti", "semicontinuity", "det", "rounding", "cutoff",
                                              "kernel_tol", "zero_split", "tol_psd", "count_slack"};
  return names;
}

AnalysisOptions RunConfig::analysis_options() const {
  AnalysisOptions o;
  o.oracle.grid_size = oracle_grid;
  o.spectrum.dense_limit = dense_limit;
  o.spectrum.char_poly_limit = char_poly_limit;
  for (const auto& [name, value] : tolerances) {
    if (name == "betti") o.betti_tolerance = value;
    else if (name == "semicontinuity") o.semicontinuity_tolerance = value;
    else if (name == "det") o.det_tolerance = value;
    else if (name == "rounding") o.rounding = value;
    else if (name == "cutoff") o.cutoff_fraction = value;
    else if (name == "kernel_tol") o.oracle.kernel_tol = value;
    else if (name == "zero_split") o.spectrum.zero_split = value;
    else if (name == "tol_psd") o.spectrum.tol_psd = value;
    else if (name == "count_slack") o.spectrum.count_slack = value;
  }
  return o;
}

void RunConfig::validate() const {
  if (oracle_grid < 2 || oracle_grid % 2 != 0) {
    throw UsageError("--oracle-grid must be even and at least 2");
  }
  for (std::size_t i = 0; i < m_list.size(); ++i) {
    if (m_list[i] == 0) throw UsageError("m values must be positive");
    if (i > 0 && m_list[i] <= m_list[i - 1]) throw UsageError("--m must be strictly increasing");
  }
  for (const auto& [name, value] : tolerances) {
    if (std::find(tolerance_names().begin(), tolerance_names().end(), name) == tolerance_names().end()) {
      throw UsageError("unknown tolerance '" + name + "'");
    }
    if (!(value > 0)) throw UsageError("tolerance '" + name + "' must be positive");
  }
  if (bcs.empty()) throw UsageError("no boundary condition selected");
}

std::vector<std::size_t> parse_m_list(std::string_view text) {
  const std::string s = trim(text);
  if (s.empty()) throw UsageError("--m list is empty");
  std::vector<std::size_t> out;
  if (s.rfind("pow2:", 0) == 0) {
    const auto parts = split(s, ':');
    if (parts.size() != 3) throw UsageError("expected pow2:a:b");
    const auto a = parse_integer<unsigned>(parts[1], "exponent");
    const auto b = parse_integer<unsigned>(parts[2], "exponent");
    if (b > 40 || a > b) throw UsageError("pow2 exponents must satisfy a <= b <= 40");
    for (unsigned e = a; e <= b; ++e) out.push_back(std::size_t{1} << e);
  } else if (s.rfind("range:", 0) == 0) {
    const auto parts = split(s, ':');
    if (parts.size() != 4) throw UsageError("expected range:a:b:step");
    const auto a = parse_integer<std::size_t>(parts[1], "m");
    const auto b = parse_integer<std::size_t>(parts[2], "m");
    const auto step = parse_integer<std::size_t>(parts[3], "step");
    if (step == 0 || a > b) throw UsageError("range needs a <= b and step > 0");
    for (std::size_t m = a; m <= b; m += step) out.push_back(m);
  } else {
    for (const auto& part : split(s, ',')) out.push_back(parse_integer<std::size_t>(part, "m"));
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] == 0) throw UsageError("m values must be positive");
    if (i > 0 && out[i] <= out[i - 1]) throw UsageError("--m must be strictly increasing");
  }
  return out;
}

std::vector<double> parse_lambdas(std::string_view text) {
  const std::string s = trim(text);
  if (s.empty()) throw UsageError("--lambdas list is empty");
  std::vector<double> out;
  if (s.rfind("logspace:", 0) == 0) {
    const auto parts = split(s, ':');
    if (parts.size() != 4) throw UsageError("expected logspace:a:b:n");
    const double a = parse_real(parts[1], "lambda");
    const double b = parse_real(parts[2], "lambda");
    const auto n = parse_integer<std::size_t>(parts[3], "count");
    if (!(a > 0) || !(b > 0) || n == 0) throw UsageError("logspace needs positive endpoints and n >= 1");
    for (std::size_t i = 0; i < n; ++i) {
      const double t = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
      out.push_back(std::exp(std::log(a) + t * (std::log(b) - std::log(a))));
    }
  } else {
    for (const auto& part : split(s, ',')) out.push_back(parse_real(part, "lambda"));
  }
  for (double v : out) {
    if (v < 0) throw UsageError("lambda values must be nonnegative");
  }
  return out;
}

std::optional<std::vector<int>> parse_degrees(std::string_view text) {
  const std::string s = trim(text);
  if (s == "all") return std::nullopt;
  if (s.empty()) throw UsageError("--j is empty");
  std::vector<int> out;
  for (const auto& part : split(s, ',')) {
    const auto dash = part.find('-');
    if (dash != std::string::npos && dash > 0) {
      const int a = parse_integer<int>(part.substr(0, dash), "degree");
      const int b = parse_integer<int>(part.substr(dash + 1), "degree");
      if (a > b) throw UsageError("degree range " + part + " is empty");
      for (int j = a; j <= b; ++j) out.push_back(j);
    } else {
      out.push_back(parse_integer<int>(part, "degree"));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.front() < 0) throw UsageError("degrees must be nonnegative");
  return out;
}

std::vector<BoundaryCondition> parse_bc(std::string_view text) {
  if (text == "both") return {BoundaryCondition::absolute, BoundaryCondition::relative};
  try {
    return {parse_boundary_condition(text)};
  } catch (const Error&) {
    throw UsageError("--bc must be absolute, relative or both");
  }
}

std::pair<std::string, double> parse_tolerance(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos || eq == 0) throw UsageError("--tol expects NAME=VALUE");
  const std::string name = trim(text.substr(0, eq));
  const double value = parse_real(text.substr(eq + 1), "tolerance");
  if (std::find(tolerance_names().begin(), tolerance_names().end(), name) == tolerance_names().end()) {
    throw UsageError("unknown tolerance '" + name + "'");
  }
  if (!(value > 0)) throw UsageError("tolerance '" + name + "' must be positive");
  return {name, value};
}

std::vector<std::int64_t> parse_polynomial(std::string_view text) {
  const std::string s = trim(text);
  if (s.empty()) throw UsageError("--poly is empty");
  std::vector<std::int64_t> out;
  for (const auto& part : split(s, ',')) out.push_back(parse_integer<std::int64_t>(part, "coefficient"));
  if (out.size() > 9) throw UsageError("--poly degree must be at most 8");
  return out;
}

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) value = 0.0;  // folds -0
  char buf[64];
  std::snprintf(buf, sizeof buf, "%#.12g", value);
  return buf;
}

// ---------------------------------------------------------------------------

int cmd_validate(const RunConfig& config, std::ostream& out) {
  const Loaded x = load(config);
  out << describe(x.complex, x.family);
  return kOk;
}

int cmd_betti(const RunConfig& config, std::ostream& out) {
  if (config.m_list.empty()) throw UsageError("betti needs a nonempty --m list");
  const Loaded x = load(config);
  const AnalysisOptions options = config.analysis_options();
  const auto dir = prepare_out(config);
  ordered_json doc = header_json(config, "betti");
  doc["oracle"] = oracle_json(config, options);
  doc["reports"] = ordered_json::array();
  bool all = true;
  for (int j : degrees_of(config, x.complex)) {
    for (BoundaryCondition bc : config.bcs) {
      const ConvergenceReport r = betti_convergence(x.complex, j, bc, config.m_list, config.oracle_grid, options);
      const std::string file = stem("betti", j, bc) + ".csv";
      CsvFile csv(dir / file, {"j", "bc", "m", "N_m", "b_j", "F_m(0)", "target", "residual"});
      out << "betti j=" << j << " bc=" << bc_name(bc) << " oracle=" << format_real(r.oracle_betti)
          << " +- " << format_real(r.oracle_error) << "\n";
      out << "  m N_m b_j F_m(0) residual\n";
      for (const auto& row : r.rows) {
        csv.row({std::to_string(j), bc_name(bc), u(row.m), u(row.translates), u(row.betti), format_real(row.F0),
                 format_real(row.target), format_real(row.residual)});
        out << "  " << row.m << " " << row.translates << " " << row.betti << " " << format_real(row.F0) << " "
            << format_real(row.residual) << "\n";
      }
      out << "  verdict " << verdict(r.pass) << " (final residual " << format_real(r.rows.back().residual)
          << ", tolerance " << format_real(r.tolerance) << ")\n";
      all = all && r.pass;
      doc["reports"].push_back({{"j", j},
                                {"bc", bc_name(bc)},
                                {"csv", file},
                                {"oracle_betti", r.oracle_betti},
                                {"oracle_error", r.oracle_error},
                                {"final_F0", r.rows.back().F0},
                                {"final_residual", r.rows.back().residual},
                                {"tolerance", r.tolerance},
                                {"verdict", verdict(r.pass)}});
    }
  }
  doc["verdict"] = verdict(all);
  write_json(dir / "betti_summary.json", doc);
  return all ? kOk : kCheckFailed;
}

int cmd_density(const RunConfig& config, std::ostream& out) {
  if (config.m_list.empty()) throw UsageError("density needs a nonempty --m list");
  if (config.lambdas.empty()) throw UsageError("density needs a nonempty --lambdas list");
  const Loaded x = load(config);
  const AnalysisOptions options = config.analysis_options();
  const auto dir = prepare_out(config);
  ordered_json doc = header_json(config, "density");
  doc["oracle"] = oracle_json(config, options);
  doc["lambdas"] = config.lambdas;
  doc["tables"] = ordered_json::array();
  for (int j : degrees_of(config, x.complex)) {
    const VNDensity vn(x.family.laplacians.at(static_cast<std::size_t>(j)), options.oracle);
    for (BoundaryCondition bc : config.bcs) {
      std::vector<SpectrumSummary> summaries;
      ordered_json pieces = ordered_json::array();
      for (std::size_t m : config.m_list) {
        summaries.push_back(piece_spectrum(x.complex, j, bc, m, options.spectrum));
        const SpectrumSummary& s = summaries.back();
        pieces.push_back({{"m", m},
                          {"N_m", s.translate_count()},
                          {"dimension", s.dimension()},
                          {"kernel_dim", s.kernel_dim()},
                          {"backend", s.has_eigenvalues() ? "dense" : "inertia"}});
      }
      std::vector<std::string> header{"lambda"};
      for (std::size_t m : config.m_list) header.push_back("F_m[" + u(m) + "]");
      header.push_back("F_oracle");
      header.push_back("F_oracle_error");
      for (std::size_t m : config.m_list) header.push_back("g_m[" + u(m) + "]");
      const std::string file = stem("density", j, bc) + ".csv";
      CsvFile csv(dir / file, header);
      out << "density j=" << j << " bc=" << bc_name(bc) << " (" << file << ")\n";
      for (double lambda : config.lambdas) {
        std::vector<std::string> cells{format_real(lambda)};
        for (const auto& s : summaries) cells.push_back(format_real(s.F(lambda)));
        cells.push_back(format_real(vn.F(lambda)));
        cells.push_back(format_real(vn.F_error(lambda)));
        for (const auto& s : summaries) {
          cells.push_back(format_real(static_cast<double>(s.E(lambda) - s.E(0.0)) /
                                      static_cast<double>(s.translate_count())));
        }
        csv.row(cells);
        out << "  lambda=" << format_real(lambda) << " F_oracle=" << format_real(vn.F(lambda));
        for (std::size_t i = 0; i < summaries.size(); ++i) {
          out << " F_" << config.m_list[i] << "=" << format_real(summaries[i].F(lambda));
        }
        out << "\n";
      }
      doc["tables"].push_back({{"j", j},
                               {"bc", bc_name(bc)},
                               {"csv", file},
                               {"oracle_betti", vn.betti()},
                               {"pieces", pieces}});
    }
  }
  write_json(dir / "density_summary.json", doc);
  return kOk;
}

int cmd_determinant(const RunConfig& config, std::ostream& out) {
  if (config.m_list.empty()) throw UsageError("determinant needs a nonempty --m list");
  const Loaded x = load(config);
  const AnalysisOptions options = config.analysis_options();
  const auto dir = prepare_out(config);
  ordered_json doc = header_json(config, "determinant");
  doc["oracle"] = oracle_json(config, options);
  doc["reports"] = ordered_json::array();
  bool all = true;
  for (int j : degrees_of(config, x.complex)) {
    for (BoundaryCondition bc : config.bcs) {
      const DetClassReport r = det_class_report(x.complex, j, bc, config.m_list, config.oracle_grid, options);
      const std::string file = stem("determinant", j, bc) + ".csv";
      CsvFile csv(dir / file, {"j", "bc", "m", "N_m", "dimension", "kernel", "det_prime", "log_det_normalized",
                               "I_m", "I_m_stieltjes", "integral_bound", "integral_slack", "det_ok", "integral_ok"});
      out << "determinant j=" << j << " bc=" << bc_name(bc) << " K^2=" << format_real(r.K2) << "\n";
      for (const auto& row : r.rows) {
        csv.row({std::to_string(j), bc_name(bc), u(row.m), u(row.translates), u(row.dimension), u(row.kernel),
                 row.det_prime ? row.det_prime->get_str() : "", format_real(row.normalized_log_det),
                 format_real(row.integral_closed), format_real(row.integral_stieltjes), format_real(row.integral_bound),
                 format_real(row.integral_slack), row.det_ok ? "1" : "0", row.integral_ok ? "1" : "0"});
        out << "  m=" << row.m << " log det'/N=" << format_real(row.normalized_log_det)
            << " I_m=" << format_real(row.integral_closed) << " slack=" << format_real(row.integral_slack) << "\n";
      }
      out << "  oracle log det' = " << format_real(r.oracle_log_det) << " +- "
          << format_real(r.oracle_log_det_error) << "\n";
      out << "  determinant class: " << verdict(r.determinant_class()) << "\n";
      all = all && r.determinant_class();
      doc["reports"].push_back({{"j", j},
                                {"bc", bc_name(bc)},
                                {"csv", file},
                                {"K2", r.K2},
                                {"oracle_log_det", r.oracle_log_det},
                                {"oracle_log_det_error", r.oracle_log_det_error},
                                {"oracle_integral", r.oracle_integral},
                                {"oracle_cutoff", r.oracle_cutoff},
                                {"window_min_integral", r.window_min_integral},
                                {"det_positive", r.det_positive},
                                {"integral_bound_holds", r.integral_bound_holds},
                                {"semicontinuity_holds", r.semicontinuity_holds},
                                {"oracle_nonnegative", r.oracle_nonnegative},
                                {"verdict", verdict(r.determinant_class())}});
    }
  }
  doc["verdict"] = verdict(all);
  write_json(dir / "determinant_summary.json", doc);
  return all ? kOk : kCheckFailed;
}

int cmd_regularity(const RunConfig& config, std::ostream& out) {
  if (config.m_list.empty()) throw UsageError("regularity needs a nonempty --m list");
  const Loaded x = load(config);
  const auto dir = prepare_out(config);
  const auto rows = regularity_report(x.complex, config.m_list, config.deltas);
  CsvFile csv(dir / "regularity.csv", {"m", "delta", "N_m", "collar", "ratio"});
  for (const auto& r : rows) {
    csv.row({u(r.m), u(r.delta), u(r.translates), u(r.collar), format_real(r.ratio)});
    out << "m=" << r.m << " delta=" << r.delta << " ratio=" << format_real(r.ratio) << "\n";
  }
  ordered_json doc = header_json(config, "regularity");
  doc["deltas"] = config.deltas;
  doc["csv"] = "regularity.csv";
  write_json(dir / "regularity_summary.json", doc);
  return kOk;
}

int cmd_trace(const RunConfig& config, std::ostream& out) {
  if (config.m_list.empty()) throw UsageError("trace needs a nonempty --m list");
  const Loaded x = load(config);
  const auto dir = prepare_out(config);
  ordered_json doc = header_json(config, "trace");
  doc["polynomial"] = config.polynomial;
  doc["reports"] = ordered_json::array();
  bool all = true;
  for (int j : degrees_of(config, x.complex)) {
    for (BoundaryCondition bc : config.bcs) {
      const TraceApproxLedger l = trace_approximation_check(x.complex, j, config.polynomial, config.m_list, bc);
      const std::string file = stem("trace", j, bc) + ".csv";
      CsvFile csv(dir / file, {"j", "bc", "m", "N_m", "collar", "vn_side", "finite_side", "difference", "bound", "ok"});
      out << "trace j=" << j << " bc=" << bc_name(bc) << " C=" << format_real(l.C) << "\n";
      for (const auto& row : l.rows) {
        csv.row({std::to_string(j), bc_name(bc), u(row.m), u(row.translates), u(row.collar), format_real(row.vn_side),
                 format_real(row.finite_side), format_real(row.difference), format_real(row.bound),
                 row.ok ? "1" : "0"});
        out << "  m=" << row.m << " difference=" << format_real(row.difference) << " bound=" << format_real(row.bound)
            << "\n";
      }
      all = all && l.all_within_bound();
      doc["reports"].push_back({{"j", j}, {"bc", bc_name(bc)}, {"csv", file}, {"C", l.C},
                                {"verdict", verdict(l.all_within_bound())}});
    }
  }
  doc["verdict"] = verdict(all);
  write_json(dir / "trace_summary.json", doc);
  return all ? kOk : kCheckFailed;
}

int cmd_tail(const RunConfig& config, std::ostream& out) {
  if (config.m_list.empty()) throw UsageError("tail needs a nonempty --m list");
  if (config.lambdas.empty()) throw UsageError("tail needs a nonempty --lambdas list");
  for (double lambda : config.lambdas) {
    if (!(lambda > 0.0 && lambda < 1.0)) throw UsageError("tail bound lambdas must lie in (0, 1)");
  }
  const Loaded x = load(config);
  const AnalysisOptions options = config.analysis_options();
  const auto dir = prepare_out(config);
  ordered_json doc = header_json(config, "tail");
  doc["lambdas"] = config.lambdas;
  doc["reports"] = ordered_json::array();
  bool all = true;
  for (int j : degrees_of(config, x.complex)) {
    for (BoundaryCondition bc : config.bcs) {
      std::vector<SpectrumSummary> summaries;
      double a = 0.0;
      for (std::size_t m : config.m_list) {
        summaries.push_back(piece_spectrum(x.complex, j, bc, m, options.spectrum));
        a = std::max(a, summaries.back().cochain_ratio());
      }
      const std::string file = stem("tail", j, bc) + ".csv";
      CsvFile csv(dir / file, {"j", "bc", "m", "lambda", "lhs", "rhs", "slack", "ok"});
      std::size_t violations = 0;
      for (std::size_t i = 0; i < summaries.size(); ++i) {
        const TailBoundLedger l = tail_bound_check(summaries[i], x.family.K2(j), a, config.lambdas, config.m_list[i]);
        violations += l.violations();
        for (const auto& e : l.entries) {
          csv.row({std::to_string(j), bc_name(bc), u(e.m), format_real(e.lambda), format_real(e.lhs),
                   format_real(e.rhs), format_real(e.slack), e.ok ? "1" : "0"});
        }
      }
      out << "tail j=" << j << " bc=" << bc_name(bc) << " a=" << format_real(a) << " violations=" << violations << "\n";
      all = all && violations == 0;
      doc["reports"].push_back({{"j", j}, {"bc", bc_name(bc)}, {"csv", file}, {"a", a}, {"K2", x.family.K2(j)},
                                {"violations", violations}, {"verdict", verdict(violations == 0)}});
    }
  }
  doc["verdict"] = verdict(all);
  write_json(dir / "tail_summary.json", doc);
  return all ? kOk : kCheckFailed;
}

int cmd_export(const RunConfig& config, std::ostream& out) {
  if (config.m_list.empty()) throw UsageError("export needs a nonempty --m list");
  const Loaded x = load(config);
  const auto dir = prepare_out(config);
  for (std::size_t m : config.m_list) {
    const FinitePiece piece = build_piece(x.complex, FolnerBox{m, x.complex.deck_rank()});
    for (int j : degrees_of(config, x.complex)) {
      for (BoundaryCondition bc : config.bcs) {
        const FiniteLaplacian lap = assemble(piece, x.complex, j, bc);
        const std::string file = "laplacian_j" + std::to_string(j) + "_" + bc_name(bc) + "_m" + u(m) + ".triples";
        std::ofstream f(dir / file, std::ios::binary);
        if (!f) throw Error("cannot write " + (dir / file).string());
        write_triples(f, lap.matrix);
        out << file << " " << lap.dimension() << "x" << lap.dimension() << "\n";
      }
    }
  }
  return kOk;
}

// ---------------------------------------------------------------------------

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Følner approximation of L2 invariants of Z^d covers"};
  app.require_subcommand(1);

  struct Raw {
    std::string input;
    std::string j = "all";
    std::string bc = "absolute";
    std::string m;
    std::string lambdas = "0,0.01,0.1,0.5,1,2,4";
    std::string deltas = "0,1,2,3";
    std::string poly = "0,1";
    std::size_t grid = 256;
    std::string out = ".";
    std::uint64_t seed = 0;
    std::vector<std::string> tols;
    std::size_t dense_limit = SpectrumOptions{}.dense_limit;
    std::size_t char_poly_limit = SpectrumOptions{}.char_poly_limit;
  } raw;

  const std::vector<std::pair<std::string, std::string>> commands{
      {"validate", "load a document and print cell counts and locality constants"},
      {"betti", "normalised Betti numbers of the pieces against the oracle"},
      {"density", "spectral density tables F_m(lambda), oracle F(lambda) and gap sequence"},
      {"determinant", "determinant-class ledger"},
      {"regularity", "collar ratios of the box exhaustion"},
      {"trace", "trace approximation ledger for a polynomial in the Laplacian"},
      {"tail", "logarithmic tail bound ledger"},
      {"export", "write assembled Laplacians as sparse triples"}};
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--input", raw.input, "periodic-complex document")->required();
    if (name != "validate") {
      sub->add_option("--j", raw.j, "degrees: N, A-B, list or all");
      sub->add_option("--bc", raw.bc, "absolute, relative or both");
      sub->add_option("--m", raw.m, "box sides: list, pow2:a:b or range:a:b:step")->required();
      sub->add_option("--oracle-grid", raw.grid, "oracle points per torus axis");
      sub->add_option("--out", raw.out, "output directory");
      sub->add_option("--tol", raw.tols, "tolerance override NAME=VALUE");
      sub->add_option("--seed", raw.seed, "seed recorded for randomised self-tests");
      sub->add_option("--dense-limit", raw.dense_limit, "largest dimension for dense eigensolves");
      sub->add_option("--char-poly-limit", raw.char_poly_limit, "largest dimension for exact char polys");
    }
    if (name == "density" || name == "tail") sub->add_option("--lambdas", raw.lambdas, "list or logspace:a:b:n");
    if (name == "regularity") sub->add_option("--delta", raw.deltas, "collar widths");
    if (name == "trace") sub->add_option("--poly", raw.poly, "coefficients c0,c1,... of p(x)");
    subs[name] = sub;
  }

  try {
    std::vector<std::string> args;
    for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }

  RunConfig config;
  try {
    for (const auto& [name, sub] : subs) {
      if (sub->parsed()) config.command = name;
    }
    config.input = raw.input;
    if (config.command != "validate") {
      config.degrees = parse_degrees(raw.j);
      config.bcs = parse_bc(raw.bc);
      config.m_list = parse_m_list(raw.m);
      if (config.command == "density" || config.command == "tail") config.lambdas = parse_lambdas(raw.lambdas);
      if (config.command == "regularity") {
        config.deltas.clear();
        for (const auto& part : split(raw.deltas, ',')) {
          config.deltas.push_back(parse_integer<std::size_t>(part, "delta"));
        }
      }
      if (config.command == "trace") config.polynomial = parse_polynomial(raw.poly);
      config.oracle_grid = raw.grid;
      config.out_dir = raw.out;
      config.seed = raw.seed;
      config.dense_limit = raw.dense_limit;
      config.char_poly_limit = raw.char_poly_limit;
      for (const auto& t : raw.tols) config.tolerances.insert(parse_tolerance(t));
    }
    config.validate();
  } catch (const Error& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    const std::string& c = config.command;
    if (c == "validate") return cmd_validate(config, out);
    if (c == "betti") return cmd_betti(config, out);
    if (c == "density") return cmd_density(config, out);
    if (c == "determinant") return cmd_determinant(config, out);
    if (c == "regularity") return cmd_regularity(config, out);
    if (c == "trace") return cmd_trace(config, out);
    if (c == "tail") return cmd_tail(config, out);
    if (c == "export") return cmd_export(config, out);
    err << "usage error: unknown command\n";
    return kUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kUsage;
  } catch (const ChainComplexError& e) {
    err << "chain complex error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kCheckFailed;
  }
}

}  // namespace l2approx::cli
