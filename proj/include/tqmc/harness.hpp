#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "tqmc/config.hpp"
#include "tqmc/discrepancy.hpp"
#include "tqmc/geometry.hpp"
#include "tqmc/integrate.hpp"
#include "tqmc/sequences.hpp"

namespace tqmc {

inline constexpr const char* kVersion = "1.0.0";
/// Bumped whenever a CSV header or JSON key changes.
inline constexpr int kSchemaVersion = 1;
/// Environment variable holding the root directory for experiment output.
inline constexpr const char* kOutputRootEnv = "TQMC_OUTPUT_ROOT";

struct RateRow {
  double N = 0.0;
  double value = 0.0;
};

struct RateFit {
  std::size_t points = 0;
  double slope = 0.0, intercept = 0.0, residual_rms = 0.0;
  std::vector<double> residuals;
  /// Regression of log(value / log N) on log N; needs every N > 1.
  bool has_log_corrected = false;
  double lc_slope = 0.0, lc_intercept = 0.0, lc_residual_rms = 0.0;
  std::vector<double> lc_residuals;
};

/// Least squares in log-log coordinates. Needs at least 4 rows and
/// positive values; errors name the offending row.
RateFit fit_rate(const std::vector<RateRow>& rows);

struct PlotSeries {
  std::string label;
  std::vector<RateRow> rows;
  std::optional<RateFit> fit;
};

/// Self-contained SVG: log-log scatter per series plus its fitted line.
/// Output depends only on the input.
void emit_plot(std::ostream& out, const std::vector<PlotSeries>& series, const std::string& title = "");
void emit_plot(std::ostream& out, const std::vector<RateRow>& rows, const RateFit& fit, const std::string& title = "");

enum class DiscKind { grid, oracle, et };
const char* to_string(DiscKind k);
DiscKind parse_disc_kind(const std::string& s);

struct ExperimentConfig {
  std::string name = "experiment";
  Family family = Family::cubic_kronecker;
  KroneckerSpec spec;
  std::uint64_t seed = 1;
  int precision = FixedReal::kDefaultPrecision;
  ConvexBody body = ConvexBody::disk({0.5, 0.5}, 0.35);
  std::vector<long> schedule;

  DiscKind method = DiscKind::grid;
  int G = 32;
  int depth = 4;
  int top = 32;
  int oracle_grid = 64;
  Window window;  // et only
  /// Fixed cutoff R; unset means ceil(N^{2/3}).
  std::optional<double> R;
  double psi_power = 12.0;

  std::optional<TrigPolynomial> integrand;
  std::string output;  // relative to the output root unless absolute

  /// Throws config::ParseError naming the field and its line.
  static ExperimentConfig from_table(const config::Table& t);
  static ExperimentConfig from_file(const std::string& path);
  double cutoff(long N) const;
  PointSet points(long N) const;
};

/// Builds a spec from `generator = "plastic" | "cube_root_two" | "golden"`
/// or an inline generator table.
KroneckerSpec spec_from_config(const config::Value& v, int precision);

struct ExperimentRow {
  long N = 0;
  DiscrepancyEstimate disc;
  CertificateReport certificate;
  std::optional<IntegrationReport> integration;
};

struct ExperimentResult {
  std::vector<ExperimentRow> rows;
  std::optional<RateFit> fit;
  std::optional<RateFit> certificate_fit;
  std::optional<RateFit> error_fit;
  std::filesystem::path directory;
};

/// `cfg.output` under $TQMC_OUTPUT_ROOT when it is set and the path is
/// relative; otherwise `cfg.output` itself ("out/<name>" when empty).
std::filesystem::path resolve_output_dir(const ExperimentConfig& cfg);

/// Computes every row (distinct N in parallel) and, when `dir` is given,
/// writes discrepancy.csv, certificate.csv, integration.csv (with an
/// integrand only), summary.json and rate.svg.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::optional<std::filesystem::path>& dir);

/// `N,R,term_const,term_smooth,term_product,total`.
void write_certificate_csv_header(std::ostream& out);
void write_certificate_csv_row(std::ostream& out, const CertificateReport& r);

/// Reads (N, value) pairs from a CSV with a header naming both columns.
std::vector<RateRow> read_rate_csv(std::istream& in, const std::string& value_column = "value");

}  // namespace tqmc
