#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "l2approx/analysis.hpp"

namespace l2approx::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kUsage = 2 };

/// Bad flags or inconsistent configuration; maps to exit code 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  std::string command;
  std::filesystem::path input;
  std::optional<std::vector<int>> degrees;  ///< all degrees when unset
  std::vector<BoundaryCondition> bcs{BoundaryCondition::absolute};
  std::vector<std::size_t> m_list;
  std::vector<double> lambdas;
  std::vector<std::size_t> deltas{0, 1, 2, 3};
  std::vector<std::int64_t> polynomial{0, 1};
  std::size_t oracle_grid = 256;
  std::filesystem::path out_dir = ".";
  std::uint64_t seed = 0;
  std::size_t dense_limit = SpectrumOptions{}.dense_limit;
  std::size_t char_poly_limit = SpectrumOptions{}.char_poly_limit;
  std::map<std::string, double> tolerances;

  AnalysisOptions analysis_options() const;
  /// Throws UsageError when an invariant fails.
  void validate() const;
};

/// "4,8,16" or "pow2:a:b" (2^a, ..., 2^b) or "range:a:b:step".
std::vector<std::size_t> parse_m_list(std::string_view text);
/// "0,0.5,1" or "logspace:a:b:n".
std::vector<double> parse_lambdas(std::string_view text);
/// "1", "0-2", "0,2" or "all" (returns nullopt).
std::optional<std::vector<int>> parse_degrees(std::string_view text);
/// "absolute", "relative" or "both".
std::vector<BoundaryCondition> parse_bc(std::string_view text);
/// "NAME=VALUE", VALUE positive.
std::pair<std::string, double> parse_tolerance(std::string_view text);
/// "c0,c1,..." coefficients of p(x) in ascending order.
std::vector<std::int64_t> parse_polynomial(std::string_view text);

/// Names accepted by --tol.
const std::vector<std::string>& tolerance_names();

/// Fixed 12 significant digits with '.' as decimal separator.
std::string format_real(double value);

int cmd_validate(const RunConfig& config, std::ostream& out);
int cmd_betti(const RunConfig& config, std::ostream& out);
int cmd_density(const RunConfig& config, std::ostream& out);
int cmd_determinant(const RunConfig& config, std::ostream& out);
int cmd_regularity(const RunConfig& config, std::ostream& out);
int cmd_trace(const RunConfig& config, std::ostream& out);
int cmd_tail(const RunConfig& config, std::ostream& out);
int cmd_export(const RunConfig& config, std::ostream& out);

/// Parses argv and dispatches; never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace l2approx::cli
