#include "tqmc/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace tqmc {

namespace {

std::string fmt(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

bool plottable(const RateRow& r) { return r.N > 0 && r.value > 0 && std::isfinite(r.N) && std::isfinite(r.value); }

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct LineFit {
  double slope, intercept, rms;
  std::vector<double> residuals;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    A(i, 0) = x[static_cast<std::size_t>(i)];
    A(i, 1) = 1.0;
    b(i) = y[static_cast<std::size_t>(i)];
  }
  Eigen::Vector2d coef = A.colPivHouseholderQr().solve(b);
  Eigen::VectorXd r = b - A * coef;
  LineFit f{coef(0), coef(1), std::sqrt(r.squaredNorm() / static_cast<double>(n)), {}};
  f.residuals.assign(r.data(), r.data() + n);
  return f;
}

std::string row_error(std::size_t i, const RateRow& r, const std::string& what) {
  std::ostringstream os;
  os.precision(17);
  os << "fit_rate: row " << i + 1 << " (N = " << r.N << ", value = " << r.value << ") " << what;
  return os.str();
}

template <class T>
T field_or(const config::Table& t, const std::string& key, T fallback);

template <>
std::int64_t field_or(const config::Table& t, const std::string& key, std::int64_t fallback) {
  const auto* v = config::find(t, key);
  return v ? v->as_int(key) : fallback;
}

template <>
double field_or(const config::Table& t, const std::string& key, double fallback) {
  const auto* v = config::find(t, key);
  return v ? v->as_double(key) : fallback;
}

template <>
std::string field_or(const config::Table& t, const std::string& key, std::string fallback) {
  const auto* v = config::find(t, key);
  return v ? v->as_string(key) : fallback;
}

int positive_int(const config::Table& t, const std::string& key, int fallback) {
  auto v = field_or<std::int64_t>(t, key, fallback);
  if (v < 1 || v > (1 << 20))
    throw config::ParseError(config::find(t, key)->line, "field '" + key + "': must be a positive integer");
  return static_cast<int>(v);
}

nlohmann::ordered_json fit_json(const std::optional<RateFit>& f) {
  if (!f) return nullptr;
  nlohmann::ordered_json j;
  j["points"] = f->points;
  j["slope"] = f->slope;
  j["intercept"] = f->intercept;
  j["residual_rms"] = f->residual_rms;
  j["residuals"] = f->residuals;
  if (f->has_log_corrected) {
    j["log_corrected"] = {{"slope", f->lc_slope},
                          {"intercept", f->lc_intercept},
                          {"residual_rms", f->lc_residual_rms},
                          {"residuals", f->lc_residuals}};
  } else {
    j["log_corrected"] = nullptr;
  }
  return j;
}

std::optional<RateFit> try_fit(const std::vector<RateRow>& rows) {
  if (rows.size() < 4) return std::nullopt;
  for (const auto& r : rows)
    if (!(r.value > 0) || !std::isfinite(r.value)) return std::nullopt;
  return fit_rate(rows);
}

}  // namespace

RateFit fit_rate(const std::vector<RateRow>& rows) {
  if (rows.size() < 4) throw std::invalid_argument("fit_rate: need at least 4 rows, got " + std::to_string(rows.size()));
  std::vector<double> x, y;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!(rows[i].N > 0)) throw std::invalid_argument(row_error(i, rows[i], "has nonpositive N"));
    if (!(rows[i].value > 0)) throw std::invalid_argument(row_error(i, rows[i], "has a nonpositive value"));
    if (!std::isfinite(rows[i].value) || !std::isfinite(rows[i].N))
      throw std::invalid_argument(row_error(i, rows[i], "is not finite"));
    x.push_back(std::log(rows[i].N));
    y.push_back(std::log(rows[i].value));
  }
  RateFit fit;
  fit.points = rows.size();
  LineFit plain = least_squares(x, y);
  fit.slope = plain.slope;
  fit.intercept = plain.intercept;
  fit.residual_rms = plain.rms;
  fit.residuals = plain.residuals;
  if (std::all_of(rows.begin(), rows.end(), [](const RateRow& r) { return r.N > 1; })) {
    std::vector<double> yc(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) yc[i] = y[i] - std::log(x[i]);
    LineFit lc = least_squares(x, yc);
    fit.has_log_corrected = true;
    fit.lc_slope = lc.slope;
    fit.lc_intercept = lc.intercept;
    fit.lc_residual_rms = lc.rms;
    fit.lc_residuals = lc.residuals;
  }
  return fit;
}

void emit_plot(std::ostream& out, const std::vector<PlotSeries>& series, const std::string& title) {
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  constexpr double W = 640, H = 420, L = 70, R = 150, T = 40, B = 50;
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& s : series)
    for (const auto& r : s.rows) {
      if (!plottable(r)) continue;
      xmin = std::min(xmin, std::log10(r.N));
      xmax = std::max(xmax, std::log10(r.N));
      ymin = std::min(ymin, std::log10(r.value));
      ymax = std::max(ymax, std::log10(r.value));
    }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = -1, ymax = 0;
  xmin = std::floor(xmin), xmax = std::ceil(xmax), ymin = std::floor(ymin), ymax = std::ceil(ymax);
  if (xmax <= xmin) xmax = xmin + 1;
  if (ymax <= ymin) ymax = ymin + 1;
  auto px = [&](double lx) { return L + (lx - xmin) / (xmax - xmin) * (W - L - R); };
  auto py = [&](double ly) { return H - B - (ly - ymin) / (ymax - ymin) * (H - T - B); };

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(W, 0) << "\" height=\"" << fmt(H, 0)
      << "\" viewBox=\"0 0 " << fmt(W, 0) << ' ' << fmt(H, 0) << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << fmt(W, 0) << "\" height=\"" << fmt(H, 0) << "\" fill=\"white\"/>\n";
  if (!title.empty())
    out << "<text x=\"" << fmt(W / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << xml_escape(title)
        << "</text>\n";
  out << "<g stroke=\"#cccccc\" stroke-width=\"0.5\">\n";
  for (double d = xmin; d <= xmax; d += 1)
    out << "<line x1=\"" << fmt(px(d)) << "\" y1=\"" << fmt(py(ymin)) << "\" x2=\"" << fmt(px(d)) << "\" y2=\""
        << fmt(py(ymax)) << "\"/>\n";
  for (double d = ymin; d <= ymax; d += 1)
    out << "<line x1=\"" << fmt(px(xmin)) << "\" y1=\"" << fmt(py(d)) << "\" x2=\"" << fmt(px(xmax)) << "\" y2=\""
        << fmt(py(d)) << "\"/>\n";
  out << "</g>\n<g stroke=\"black\" stroke-width=\"1\">\n"
      << "<line x1=\"" << fmt(px(xmin)) << "\" y1=\"" << fmt(py(ymin)) << "\" x2=\"" << fmt(px(xmax)) << "\" y2=\""
      << fmt(py(ymin)) << "\"/>\n"
      << "<line x1=\"" << fmt(px(xmin)) << "\" y1=\"" << fmt(py(ymin)) << "\" x2=\"" << fmt(px(xmin)) << "\" y2=\""
      << fmt(py(ymax)) << "\"/>\n</g>\n";
  for (double d = xmin; d <= xmax; d += 1)
    out << "<text x=\"" << fmt(px(d)) << "\" y=\"" << fmt(py(ymin) + 16) << "\" text-anchor=\"middle\">1e"
        << fmt(d, 0) << "</text>\n";
  for (double d = ymin; d <= ymax; d += 1)
    out << "<text x=\"" << fmt(px(xmin) - 6) << "\" y=\"" << fmt(py(d) + 4) << "\" text-anchor=\"end\">1e"
        << fmt(d, 0) << "</text>\n";
  out << "<text x=\"" << fmt(px((xmin + xmax) / 2)) << "\" y=\"" << fmt(H - 12)
      << "\" text-anchor=\"middle\">N</text>\n"
      << "<text x=\"18\" y=\"" << fmt(py((ymin + ymax) / 2)) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << fmt(py((ymin + ymax) / 2)) << ")\">D</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kColors[k % std::size(kColors)];
    out << "<g fill=\"" << color << "\" stroke=\"" << color << "\">\n";
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& r : s.rows) {
      if (!plottable(r)) continue;
      lo = std::min(lo, std::log10(r.N));
      hi = std::max(hi, std::log10(r.N));
      out << "<circle cx=\"" << fmt(px(std::log10(r.N))) << "\" cy=\"" << fmt(py(std::log10(r.value)))
          << "\" r=\"3\"/>\n";
    }
    if (s.fit && std::isfinite(lo)) {
      // Fit is in natural logs; the plot uses base 10.
      auto line_y = [&](double lx) { return (s.fit->slope * lx * std::log(10.0) + s.fit->intercept) / std::log(10.0); };
      out << "<line x1=\"" << fmt(px(lo)) << "\" y1=\"" << fmt(py(line_y(lo))) << "\" x2=\"" << fmt(px(hi))
          << "\" y2=\"" << fmt(py(line_y(hi))) << "\" stroke-width=\"1.5\"/>\n";
    }
    double ly = T + 10 + 36.0 * static_cast<double>(k);
    out << "<circle cx=\"" << fmt(W - R + 14) << "\" cy=\"" << fmt(ly) << "\" r=\"3\"/>\n"
        << "<text x=\"" << fmt(W - R + 24) << "\" y=\"" << fmt(ly + 4) << "\" stroke=\"none\" fill=\"black\">"
        << xml_escape(s.label) << "</text>\n";
    if (s.fit)
      out << "<text x=\"" << fmt(W - R + 24) << "\" y=\"" << fmt(ly + 18)
          << "\" stroke=\"none\" fill=\"black\">slope " << fmt(s.fit->slope, 3) << "</text>\n";
    out << "</g>\n";
  }
  out << "</svg>\n";
}

void emit_plot(std::ostream& out, const std::vector<RateRow>& rows, const RateFit& fit, const std::string& title) {
  emit_plot(out, {PlotSeries{"D", rows, fit}}, title);
}

const char* to_string(DiscKind k) {
  switch (k) {
    case DiscKind::grid: return "grid";
    case DiscKind::oracle: return "oracle";
    case DiscKind::et: return "et";
  }
  return "unknown";
}

DiscKind parse_disc_kind(const std::string& s) {
  if (s == "grid") return DiscKind::grid;
  if (s == "oracle") return DiscKind::oracle;
  if (s == "et") return DiscKind::et;
  throw std::invalid_argument("unknown discrepancy method '" + s + "' (expected grid, oracle or et)");
}

KroneckerSpec spec_from_config(const config::Value& v, int precision) {
  if (v.is_string()) {
    const auto& name = v.as_string("generator");
    if (name == "plastic") return KroneckerSpec::plastic(precision);
    if (name == "cube_root_two") return KroneckerSpec::cube_root_two(precision);
    if (name == "golden") return KroneckerSpec::golden(precision);
    throw config::ParseError(v.line, "field 'generator': unknown name '" + name +
                                         "' (expected plastic, cube_root_two, golden or a table)");
  }
  const auto& t = v.as_table("generator");
  CubicGenerator g;
  try {
    g = CubicGenerator::from_table(t);
  } catch (const InvalidBracket& e) {
    throw config::ParseError(v.line, std::string("field 'generator': ") + e.what());
  }
  if (!config::find(t, "precision")) g.precision = precision;
  return KroneckerSpec::cubic(g);
}

ExperimentConfig ExperimentConfig::from_table(const config::Table& t) {
  ExperimentConfig c;
  c.name = field_or<std::string>(t, "name", c.name);
  if (const auto* v = config::find(t, "family")) {
    try {
      c.family = parse_family(v->as_string("family"));
    } catch (const std::invalid_argument& e) {
      throw config::ParseError(v->line, std::string("field 'family': ") + e.what());
    }
  }
  c.precision = positive_int(t, "precision", c.precision);
  if (c.precision < 64)
    throw config::ParseError(config::find(t, "precision")->line, "field 'precision': must be at least 64 bits");
  c.spec = KroneckerSpec::plastic(c.precision);
  if (const auto* v = config::find(t, "generator")) c.spec = spec_from_config(*v, c.precision);
  if (c.family == Family::degenerate_golden) c.spec = KroneckerSpec::golden(c.precision);
  if (const auto* v = config::find(t, "seed")) {
    auto s = v->as_int("seed");
    if (s < 0) throw config::ParseError(v->line, "field 'seed': must be nonnegative");
    c.seed = static_cast<std::uint64_t>(s);
  }

  const auto& body = config::require(t, "body");
  try {
    c.body = ConvexBody::from_config(body);
  } catch (const config::ParseError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw config::ParseError(body.line, std::string("field 'body': ") + e.what());
  }

  const auto& sched = config::require(t, "schedule");
  for (auto n : config::as_ints(sched, "schedule")) {
    if (n < 1 || (n & (n - 1)) != 0)
      throw config::ParseError(sched.line, "field 'schedule': " + std::to_string(n) + " is not a power of two");
    if (!c.schedule.empty() && n <= c.schedule.back())
      throw config::ParseError(sched.line, "field 'schedule': entries must be strictly increasing");
    c.schedule.push_back(n);
  }
  if (c.schedule.empty()) throw config::ParseError(sched.line, "field 'schedule': must not be empty");

  if (const auto* v = config::find(t, "discrepancy")) {
    const auto& d = v->as_table("discrepancy");
    if (const auto* m = config::find(d, "method")) {
      try {
        c.method = parse_disc_kind(m->as_string("discrepancy.method"));
      } catch (const std::invalid_argument& e) {
        throw config::ParseError(m->line, std::string("field 'discrepancy.method': ") + e.what());
      }
    }
    c.G = positive_int(d, "G", c.G);
    if (c.G < 8 || (c.G & (c.G - 1)) != 0)
      throw config::ParseError(config::find(d, "G")->line, "field 'discrepancy.G': must be a power of two >= 8");
    c.depth = static_cast<int>(field_or<std::int64_t>(d, "depth", c.depth));
    if (c.depth < 0 || c.depth > 30)
      throw config::ParseError(config::find(d, "depth")->line, "field 'discrepancy.depth': must be in [0, 30]");
    c.top = positive_int(d, "top", c.top);
    c.oracle_grid = positive_int(d, "oracle_grid", c.oracle_grid);
    c.psi_power = field_or<double>(d, "psi_power", c.psi_power);
    if (const auto* r = config::find(d, "R")) {
      if (r->is_string()) {
        if (r->as_string("discrepancy.R") != "n23")
          throw config::ParseError(r->line, "field 'discrepancy.R': expected a number or \"n23\"");
      } else {
        c.R = r->as_double("discrepancy.R");
        if (!(*c.R >= 1)) throw config::ParseError(r->line, "field 'discrepancy.R': must be at least 1");
      }
    }
    if (const auto* w = config::find(d, "window")) {
      const auto& wt = w->as_table("discrepancy.window");
      auto s = config::as_doubles(config::require(wt, "s", w->line), "discrepancy.window.s");
      auto x = config::as_doubles(config::require(wt, "x", w->line), "discrepancy.window.x");
      if (s.size() != 2 || x.size() != 2)
        throw config::ParseError(w->line, "field 'discrepancy.window': s and x need two entries each");
      c.window = Window::make({s[0], s[1]}, {x[0], x[1]});
    }
  }
  if (c.method == DiscKind::et && c.family == Family::seeded_random)
    throw config::ParseError(0, "field 'discrepancy.method': et needs a Kronecker family");
  if (c.method == DiscKind::oracle && c.schedule.back() > 128)
    throw config::ParseError(sched.line, "field 'schedule': the oracle method supports N <= 128");

  if (const auto* v = config::find(t, "integrand")) {
    const config::Value* rows = v;
    if (v->is_table()) rows = &config::require(v->as_table("integrand"), "terms", v->line);
    c.integrand = TrigPolynomial::from_config(*rows);
  }
  c.output = field_or<std::string>(t, "output", "");
  return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) { return from_table(config::parse_file(path)); }

double ExperimentConfig::cutoff(long N) const { return R ? *R : static_cast<double>(default_cutoff(N)); }

PointSet ExperimentConfig::points(long N) const {
  auto n = static_cast<std::size_t>(N);
  switch (family) {
    case Family::cubic_kronecker: return kronecker_block(spec, n);
    case Family::degenerate_golden: return degenerate_golden(n, precision);
    case Family::seeded_random: return seeded_random(seed, n);
  }
  throw std::logic_error("unknown family");
}

std::filesystem::path resolve_output_dir(const ExperimentConfig& cfg) {
  std::filesystem::path p = cfg.output.empty() ? std::filesystem::path("out") / cfg.name : std::filesystem::path(cfg.output);
  if (p.is_absolute()) return p;
  if (const char* root = std::getenv(kOutputRootEnv); root && *root) return std::filesystem::path(root) / p;
  return p;
}

void write_certificate_csv_header(std::ostream& out) { out << "N,R,term_const,term_smooth,term_product,total\n"; }

void write_certificate_csv_row(std::ostream& out, const CertificateReport& r) {
  auto old = out.precision(17);
  out << r.N << ',' << r.R << ',' << r.term_const << ',' << r.term_smooth << ',' << r.term_product << ',' << r.total
      << '\n';
  out.precision(old);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::optional<std::filesystem::path>& dir) {
  const bool has_spec = cfg.family != Family::seeded_random;
  std::optional<PhaseTable> phases;
  if (has_spec) phases.emplace(cfg.spec);
  double v_f = 0.0, reference = 0.0;
  if (cfg.integrand) {
    v_f = variation(*cfg.integrand);
    reference = reference_integral(*cfg.integrand, cfg.body);
  }

  auto one = [&](long N) {
    ExperimentRow row;
    row.N = N;
    PointSet pts = cfg.points(N);
    switch (cfg.method) {
      case DiscKind::grid: row.disc = sup_search(pts, cfg.body, cfg.G, cfg.depth, cfg.top); break;
      case DiscKind::oracle: row.disc = sup_oracle_smallN(pts, cfg.body, cfg.oracle_grid); break;
      case DiscKind::et: {
        EtKernelConfig k;
        k.R = cfg.cutoff(N);
        k.psi_power = cfg.psi_power;
        EtBound b = et_structural_bound(cfg.spec, cfg.body, cfg.window, k, N);
        row.disc.value = b.value;
        row.disc.signed_value = b.value;
        row.disc.arg_window = cfg.window;
        break;
      }
    }
    if (phases) row.certificate = certificate_sum(*phases, N, cfg.cutoff(N));
    if (cfg.integrand) {
      IntegrationReport r;
      r.N = N;
      r.qmc_value = qmc_integrate(*cfg.integrand, cfg.body, pts);
      r.reference_value = reference;
      r.abs_error = std::abs(r.qmc_value - reference);
      r.V_f = v_f;
      r.D_used = row.disc.value;
      r.D_method = cfg.method == DiscKind::et ? "et_structural" : to_string(row.disc.method);
      r.kh_product = v_f * r.D_used;
      r.violation = r.abs_error > r.kh_product;
      row.integration = r;
    }
    return row;
  };

  ExperimentResult result;
  std::vector<std::future<ExperimentRow>> jobs;
  for (long N : cfg.schedule) jobs.push_back(std::async(std::launch::async, one, N));
  for (auto& j : jobs) result.rows.push_back(j.get());

  std::vector<RateRow> disc_rows, cert_rows, err_rows;
  for (const auto& r : result.rows) {
    disc_rows.push_back({static_cast<double>(r.N), r.disc.value});
    if (has_spec) cert_rows.push_back({static_cast<double>(r.N), r.certificate.total});
    if (r.integration) err_rows.push_back({static_cast<double>(r.N), r.integration->abs_error});
  }
  result.fit = try_fit(disc_rows);
  if (has_spec) result.certificate_fit = try_fit(cert_rows);
  if (cfg.integrand) result.error_fit = try_fit(err_rows);
  if (!dir) return result;

  result.directory = *dir;
  std::filesystem::create_directories(*dir);
  auto open = [&](const std::string& name) {
    std::ofstream f(*dir / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (*dir / name).string());
    return f;
  };
  const std::string method_name =
      cfg.method == DiscKind::et ? std::string("et_structural") : std::string(to_string(result.rows.front().disc.method));
  std::vector<std::string> files{"discrepancy.csv"};
  {
    auto f = open("discrepancy.csv");
    write_csv_header(f);
    for (const auto& r : result.rows) write_csv_row(f, r.N, r.disc.value, r.disc.arg_window, method_name);
  }
  if (has_spec) {
    auto f = open("certificate.csv");
    write_certificate_csv_header(f);
    for (const auto& r : result.rows) write_certificate_csv_row(f, r.certificate);
    files.push_back("certificate.csv");
  }
  if (cfg.integrand) {
    auto f = open("integration.csv");
    write_integration_csv_header(f);
    for (const auto& r : result.rows) write_csv_row(f, *r.integration);
    files.push_back("integration.csv");
  }
  {
    std::vector<PlotSeries> series{{"D " + method_name, disc_rows, result.fit}};
    if (has_spec) series.push_back({"S(N, R)", cert_rows, result.certificate_fit});
    if (cfg.integrand) series.push_back({"|error|", err_rows, result.error_fit});
    auto f = open("rate.svg");
    emit_plot(f, series, cfg.name);
    files.push_back("rate.svg");
  }
  files.push_back("summary.json");
  {
    nlohmann::ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["version"] = kVersion;
    j["name"] = cfg.name;
    j["family"] = to_string(cfg.family);
    if (has_spec) j["generator"] = cfg.spec.generator.to_text();
    if (cfg.family == Family::seeded_random) j["seed"] = cfg.seed;
    j["precision"] = cfg.precision;
    j["body"] = cfg.body.describe();
    j["schedule"] = cfg.schedule;
    nlohmann::ordered_json d;
    d["method"] = to_string(cfg.method);
    if (cfg.method == DiscKind::grid) d["G"] = cfg.G, d["depth"] = cfg.depth, d["top"] = cfg.top;
    if (cfg.method == DiscKind::oracle) d["oracle_grid"] = cfg.oracle_grid;
    if (cfg.method == DiscKind::et)
      d["window"] = {{"s", {cfg.window.s.x(), cfg.window.s.y()}}, {"x", {cfg.window.x.x(), cfg.window.x.y()}}},
      d["psi_power"] = cfg.psi_power;
    if (cfg.R) d["R"] = *cfg.R;
    else d["R"] = "n23";
    j["discrepancy"] = d;
    auto& rows = j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : result.rows) {
      nlohmann::ordered_json o;
      o["N"] = r.N;
      o["value"] = r.disc.value;
      if (cfg.method == DiscKind::oracle) o["slack"] = r.disc.slack;
      if (has_spec) o["certificate_total"] = r.certificate.total;
      if (r.integration) o["abs_error"] = r.integration->abs_error, o["violation"] = r.integration->violation;
      rows.push_back(o);
    }
    j["fit"] = fit_json(result.fit);
    j["certificate_fit"] = fit_json(result.certificate_fit);
    if (cfg.integrand) j["error_fit"] = fit_json(result.error_fit);
    j["files"] = files;
    auto f = open("summary.json");
    f << j.dump(2) << '\n';
  }
  return result;
}

std::vector<RateRow> read_rate_csv(std::istream& in, const std::string& value_column) {
  auto split = [](const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
  };
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty CSV");
  auto header = split(line);
  auto col = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::invalid_argument("CSV header lacks column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t cn = col("N"), cv = col(value_column);
  std::vector<RateRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() <= std::max(cn, cv))
      throw std::invalid_argument("CSV line " + std::to_string(lineno) + ": too few columns");
    try {
      rows.push_back({std::stod(cells[cn]), std::stod(cells[cv])});
    } catch (const std::exception&) {
      throw std::invalid_argument("CSV line " + std::to_string(lineno) + ": not a number");
    }
  }
  return rows;
}

}  // namespace tqmc
