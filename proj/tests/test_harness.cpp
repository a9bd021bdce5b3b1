#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tqmc/harness.hpp"

using namespace tqmc;
namespace fs = std::filesystem;

namespace {

std::vector<RateRow> synthetic(const std::function<double(double)>& f) {
  std::vector<RateRow> rows;
  for (int e = 6; e <= 13; ++e) rows.push_back({std::ldexp(1.0, e), f(std::ldexp(1.0, e))});
  return rows;
}

// Minimal well-formedness check: every open tag is closed in order.
bool well_formed(const std::string& xml) {
  std::vector<std::string> stack;
  std::regex tag(R"(<(/?)([A-Za-z][\w:-]*)[^>]*?(/?)>)");
  std::size_t opened = 0;
  for (auto it = std::sregex_iterator(xml.begin(), xml.end(), tag); it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    if (m[1].length()) {
      if (stack.empty() || stack.back() != m[2].str()) return false;
      stack.pop_back();
    } else if (!m[3].length()) {
      stack.push_back(m[2].str());
      ++opened;
    }
  }
  return stack.empty() && opened > 0;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("tqmc_harness_" + name);
  fs::remove_all(p);
  return p;
}

const char* kSmoke = R"(name = "smoke"
family = "cubic_kronecker"
generator = "plastic"
body = { kind = "disk", center = [0.5, 0.5], radius = 0.35 }
schedule = [64, 128, 256, 512]

[discrepancy]
method = "grid"
G = 16
depth = 2
)";

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("rate fits on synthetic data") {
    auto p = fit_rate(synthetic([](double n) { return std::pow(n, -2.0 / 3); }));
    CHECK(std::abs(p.slope + 2.0 / 3) < 1e-12);
    CHECK(p.residual_rms < 1e-12);
    CHECK(p.points == 8);
    CHECK(p.residuals.size() == 8);
    auto l = fit_rate(synthetic([](double n) { return std::pow(n, -2.0 / 3) * std::log(n); }));
    REQUIRE(l.has_log_corrected);
    CHECK(std::abs(l.lc_slope + 2.0 / 3) < 1e-12);
    CHECK(l.lc_residual_rms < 1e-12);
    auto c = fit_rate(synthetic([](double) { return 0.3; }));
    CHECK(std::abs(c.slope) < 1e-12);
    CHECK(std::abs(c.intercept - std::log(0.3)) < 1e-12);
  }

  TEST_CASE("rate fit errors") {
    auto rows = synthetic([](double n) { return 1 / n; });
    rows[3].value = 0;
    try {
      fit_rate(rows);
      FAIL("expected an error");
    } catch (const std::invalid_argument& e) {
      CHECK(std::string(e.what()).find("row 4 (N = 512") != std::string::npos);
    }
    rows[3].value = -1;
    CHECK_THROWS_AS(fit_rate(rows), std::invalid_argument);
    rows[3].value = INFINITY;
    CHECK_THROWS_AS(fit_rate(rows), std::invalid_argument);
    rows.resize(3);
    rows[0].value = rows[1].value = rows[2].value = 1;
    CHECK_THROWS_AS(fit_rate(rows), std::invalid_argument);
  }

  TEST_CASE("plots") {
    std::vector<RateRow> rows{{64, 0.1}, {128, 0.06}, {256, 0.04}, {512, 0.025}};
    auto fit = fit_rate(rows);
    std::ostringstream a, b;
    emit_plot(a, rows, fit, "four points");
    emit_plot(b, rows, fit, "four points");
    CHECK(a.str() == b.str());
    CHECK(well_formed(a.str()));
    CHECK(a.str().find("<svg") != std::string::npos);
    CHECK(a.str().find(">N<") != std::string::npos);
    CHECK(a.str().find(">D<") != std::string::npos);
    CHECK(a.str().find("href") == std::string::npos);

    std::vector<PlotSeries> multi{{"kronecker", rows, fit}, {"random", {{64, 0.2}, {128, 0.15}, {256, 0.1}, {512, 0.07}}, {}}};
    multi[1].fit = fit_rate(multi[1].rows);
    std::ostringstream m;
    emit_plot(m, multi, "overlay");
    CHECK(well_formed(m.str()));
    CHECK(m.str().find("kronecker") != std::string::npos);
    CHECK(m.str().find("random") != std::string::npos);

    std::string golden = slurp(fs::path(TQMC_TEST_DATA) / "rate_golden.svg");
    CHECK(a.str() == golden);
  }

  TEST_CASE("experiment configs") {
    auto cfg = ExperimentConfig::from_table(config::parse(kSmoke));
    CHECK(cfg.name == "smoke");
    CHECK(cfg.schedule == std::vector<long>{64, 128, 256, 512});
    CHECK(cfg.method == DiscKind::grid);
    CHECK(cfg.G == 16);
    CHECK(cfg.cutoff(64) == 16);
    CHECK_FALSE(cfg.integrand.has_value());

    auto line_of = [](const std::string& text) {
      try {
        ExperimentConfig::from_table(config::parse(text));
      } catch (const config::ParseError& e) {
        return e.line();
      }
      return -1;
    };
    std::string bad_sched = std::regex_replace(std::string(kSmoke), std::regex("512"), "500");
    CHECK(line_of(bad_sched) == 5);
    std::string decreasing = std::regex_replace(std::string(kSmoke), std::regex("\\[64, 128"), "[128, 64");
    CHECK(line_of(decreasing) == 5);
    std::string bad_g = std::regex_replace(std::string(kSmoke), std::regex("G = 16"), "G = 12");
    CHECK(line_of(bad_g) == 9);
    std::string bad_body = std::regex_replace(std::string(kSmoke), std::regex("\"disk\""), "\"blob\"");
    CHECK(line_of(bad_body) == 4);
    std::string bad_family = std::regex_replace(std::string(kSmoke), std::regex("cubic_kronecker"), "sobol");
    CHECK(line_of(bad_family) == 2);
    std::string bad_integrand = std::string(kSmoke).insert(std::string(kSmoke).find("\n[discrepancy]"),
                                                           "\nintegrand = [[1, 0, 0.5, 0]]");
    CHECK(line_of(bad_integrand) == 7);
    std::string oracle_big = std::regex_replace(std::string(kSmoke), std::regex("\"grid\""), "\"oracle\"");
    CHECK(line_of(oracle_big) == 5);
  }

  TEST_CASE("end-to-end smoke run") {
    auto cfg = ExperimentConfig::from_table(config::parse(kSmoke));
    auto dir = scratch("smoke_a");
    auto res = run_experiment(cfg, dir);
    REQUIRE(res.rows.size() == 4);
    REQUIRE(res.fit.has_value());
    CHECK(res.fit->points == 4);
    CHECK(fs::exists(dir / "discrepancy.csv"));
    CHECK(fs::exists(dir / "certificate.csv"));
    CHECK(fs::exists(dir / "summary.json"));
    CHECK(fs::exists(dir / "rate.svg"));
    CHECK_FALSE(fs::exists(dir / "integration.csv"));

    std::istringstream csv(slurp(dir / "discrepancy.csv"));
    std::string header;
    std::getline(csv, header);
    CHECK(header == "N,value,arg_s1,arg_s2,arg_x1,arg_x2,method");
    int lines = 0;
    for (std::string l; std::getline(csv, l);) ++lines;
    CHECK(lines == 4);
    std::istringstream again(slurp(dir / "discrepancy.csv"));
    auto rows = read_rate_csv(again);
    CHECK(rows.size() == 4);
    CHECK(rows[2].N == 256);

    auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
    CHECK(summary.at("schema_version") == kSchemaVersion);
    CHECK(summary.at("version") == kVersion);

    auto dir_b = scratch("smoke_b");
    run_experiment(cfg, dir_b);
    for (const char* f : {"discrepancy.csv", "certificate.csv", "summary.json", "rate.svg"})
      CHECK_MESSAGE(slurp(dir / f) == slurp(dir_b / f), f);
    fs::remove_all(dir);
    fs::remove_all(dir_b);
  }

  TEST_CASE("integrand runs write an integration table") {
    std::string text = std::string(kSmoke) + "\n";
    text.insert(text.find("\n[discrepancy]"), "\nintegrand = [[0, 0, 1, 0], [1, 1, 0.25, 0], [-1, -1, 0.25, 0]]");
    auto cfg = ExperimentConfig::from_table(config::parse(text));
    REQUIRE(cfg.integrand.has_value());
    auto dir = scratch("integrand");
    auto res = run_experiment(cfg, dir);
    CHECK(fs::exists(dir / "integration.csv"));
    for (const auto& r : res.rows) {
      REQUIRE(r.integration.has_value());
      CHECK(r.integration->abs_error == std::abs(r.integration->qmc_value - r.integration->reference_value));
    }
    fs::remove_all(dir);
  }

  TEST_CASE("output directory resolution") {
    ExperimentConfig cfg;
    cfg.name = "x";
    cfg.output = "runs/x";
    ::setenv(kOutputRootEnv, "/tmp/tqmc_root", 1);
    CHECK(resolve_output_dir(cfg) == fs::path("/tmp/tqmc_root/runs/x"));
    cfg.output = "/abs/x";
    CHECK(resolve_output_dir(cfg) == fs::path("/abs/x"));
    ::unsetenv(kOutputRootEnv);
    cfg.output = "";
    CHECK(resolve_output_dir(cfg) == fs::path("out/x"));
  }
}
