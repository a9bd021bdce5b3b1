// tqmc: point generation, discrepancy estimates, Diophantine diagnostics,
// Fourier transforms, integration reports and rate experiments.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tqmc/config.hpp"
#include "tqmc/diophantine.hpp"
#include "tqmc/discrepancy.hpp"
#include "tqmc/fourier.hpp"
#include "tqmc/harness.hpp"
#include "tqmc/integrate.hpp"
#include "tqmc/sequences.hpp"

using namespace tqmc;

namespace {

struct PointOptions {
  std::string family = "cubic_kronecker";
  std::string generator = "plastic";
  std::uint64_t seed = 1;
  int precision = FixedReal::kDefaultPrecision;
  long n = 1024;

  void attach(CLI::App* app) {
    app->add_option("--family", family, "cubic_kronecker | degenerate_golden | seeded_random")->capture_default_str();
    app->add_option("--generator", generator,
                    "plastic | cube_root_two | golden | inline table, e.g. '{ poly = [-2, 0, 0], bracket = [1, 2] }'")
        ->capture_default_str();
    app->add_option("--seed", seed, "seed for seeded_random")->capture_default_str();
    app->add_option("--precision", precision, "fractional bits of the fixed-point arithmetic")->capture_default_str();
    app->add_option("-n,--count,--N", n, "number of points N")->capture_default_str()->check(CLI::PositiveNumber);
  }

  KroneckerSpec spec() const {
    if (parse_family(family) == Family::degenerate_golden) return KroneckerSpec::golden(precision);
    if (!generator.empty() && generator.front() == '{') return spec_from_config(config::parse_value(generator), precision);
    config::Value v;
    v.data = generator;
    return spec_from_config(v, precision);
  }

  PointSet points() const {
    auto count = static_cast<std::size_t>(n);
    switch (parse_family(family)) {
      case Family::cubic_kronecker: return kronecker_block(spec(), count);
      case Family::degenerate_golden: return degenerate_golden(count, precision);
      case Family::seeded_random: return seeded_random(seed, count);
    }
    throw std::logic_error("unknown family");
  }
};

struct BodyOptions {
  std::string body = "{ kind = \"disk\", center = [0.5, 0.5], radius = 0.35 }";
  std::vector<double> window{0.5, 0.5, 0.25, 0.25};

  void attach(CLI::App* app, bool with_window) {
    app->add_option("--body", body, "inline body table")->capture_default_str();
    if (with_window)
      app->add_option("--window", window, "s1 s2 x1 x2")->expected(4)->capture_default_str();
  }
  ConvexBody get() const { return ConvexBody::from_config(config::parse_value(body)); }
  Window get_window() const { return Window::make({window[0], window[1]}, {window[2], window[3]}); }
};

std::ostream& open_output(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write " + path);
  return file;
}

nlohmann::ordered_json fit_to_json(const RateFit& f) {
  nlohmann::ordered_json j;
  j["points"] = f.points;
  j["slope"] = f.slope;
  j["intercept"] = f.intercept;
  j["residual_rms"] = f.residual_rms;
  if (f.has_log_corrected) j["log_corrected_slope"] = f.lc_slope, j["log_corrected_residual_rms"] = f.lc_residual_rms;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kronecker point sets on the torus: discrepancy over convex bodies and integration error"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  // gen
  auto* gen = app.add_subcommand("gen", "write points as CSV (j,x1,x2)");
  PointOptions gen_pts;
  std::string gen_out;
  gen_pts.attach(gen);
  gen->add_option("-o,--output", gen_out, "output file (default stdout)");
  gen->callback([&] {
    std::ofstream f;
    write_csv(open_output(gen_out, f), gen_pts.points());
  });

  // disc
  auto* disc = app.add_subcommand("disc", "discrepancy estimates for one point set");
  disc->require_subcommand(1);
  PointOptions disc_pts;
  BodyOptions disc_body;
  int G = 32, depth = 4, top = 32, oracle_grid = 64;
  double et_R = 0, psi_power = 12;
  auto* disc_grid = disc->add_subcommand("grid", "grid screening plus local refinement (lower bound)");
  auto* disc_oracle = disc->add_subcommand("oracle", "critical-window enumeration for N <= 128");
  auto* disc_et = disc->add_subcommand("et", "Erdos-Turan structural bound at one window");
  for (auto* s : {disc_grid, disc_oracle, disc_et}) {
    disc_pts.attach(s);
    disc_body.attach(s, s == disc_et);
  }
  disc_grid->add_option("--G,--grid", G, "finest grid size, a power of two >= 8")->capture_default_str();
  disc_grid->add_option("--depth", depth, "refinement rounds")->capture_default_str();
  disc_grid->add_option("--top", top, "candidates refined per level")->capture_default_str();
  disc_oracle->add_option("--grid", oracle_grid, "background lattice size")->capture_default_str();
  disc_et->add_option("--R", et_R, "frequency cutoff (default ceil(N^{2/3}))");
  disc_et->add_option("--psi-power", psi_power, "decay power of the smoothing profile")->capture_default_str();
  disc_grid->callback([&] {
    auto e = sup_search(disc_pts.points(), disc_body.get(), G, depth, top);
    write_csv_header(std::cout);
    write_csv_row(std::cout, disc_pts.n, e);
  });
  disc_oracle->callback([&] {
    auto e = sup_oracle_smallN(disc_pts.points(), disc_body.get(), oracle_grid);
    write_csv_header(std::cout);
    write_csv_row(std::cout, disc_pts.n, e);
    std::cerr << "slack " << e.slack << '\n';
  });
  disc_et->callback([&] {
    EtKernelConfig k;
    k.R = et_R > 0 ? et_R : static_cast<double>(default_cutoff(disc_pts.n));
    k.psi_power = psi_power;
    auto b = et_structural_bound(disc_pts.spec(), disc_body.get(), disc_body.get_window(), k, disc_pts.n);
    nlohmann::ordered_json j;
    j["N"] = disc_pts.n;
    j["R"] = k.R;
    j["value"] = b.value;
    j["est_abs_error"] = b.est_abs_error;
    j["h_zero"] = b.h_zero;
    j["frequencies"] = b.frequencies;
    j["pieces"] = b.pieces;
    std::cout << j.dump(2) << '\n';
  });

  // dio
  auto* dio = app.add_subcommand("dio", "Diophantine diagnostics of (alpha, beta)");
  dio->require_subcommand(1);
  PointOptions dio_pts;
  int M = 64, di = 4, dj = 4;
  double cert_R = 0;
  bool allow_large = false;
  long n1 = 1, n2 = 0;
  auto* dio_const = dio->add_subcommand("constants", "empirical eta and gamma over max |n_i| <= M");
  auto* dio_dyadic = dio->add_subcommand("dyadic", "sum of 1/||n.(alpha, beta)|| over a dyadic box");
  auto* dio_cert = dio->add_subcommand("certificate", "certificate frequency sum S(N, R)");
  auto* dio_exp = dio->add_subcommand("expsum", "exponential sum at one frequency");
  for (auto* s : {dio_const, dio_dyadic, dio_cert, dio_exp}) dio_pts.attach(s);
  dio_const->add_option("--M", M, "frequency box")->capture_default_str();
  dio_dyadic->add_option("--i", di)->capture_default_str();
  dio_dyadic->add_option("--j", dj)->capture_default_str();
  dio_cert->add_option("--R", cert_R, "cutoff (default ceil(N^{2/3}))");
  dio_cert->add_flag("--allow-large", allow_large, "permit R > 4096");
  dio_exp->add_option("--n1", n1)->capture_default_str();
  dio_exp->add_option("--n2", n2)->capture_default_str();
  dio_const->callback([&] { write_json(std::cout, empirical_constants(dio_pts.spec(), M)); });
  dio_dyadic->callback([&] {
    auto r = dyadic_sum(dio_pts.spec(), di, dj);
    nlohmann::ordered_json j{{"i", r.i},
                             {"j", r.j},
                             {"terms", r.terms},
                             {"sum", r.sum},
                             {"gamma_tilde", r.gamma_tilde},
                             {"max_occupancy", r.max_occupancy},
                             {"first_interval", r.first_interval},
                             {"occupancy_ok", r.occupancy_ok()}};
    std::cout << j.dump(2) << '\n';
  });
  dio_cert->callback([&] {
    double R = cert_R > 0 ? cert_R : static_cast<double>(default_cutoff(dio_pts.n));
    write_json(std::cout, certificate_sum(dio_pts.spec(), dio_pts.n, R, allow_large));
  });
  dio_exp->callback([&] {
    auto r = exp_sum(dio_pts.spec(), n1, n2, dio_pts.n);
    nlohmann::ordered_json j;
    j["n"] = {n1, n2};
    j["N"] = dio_pts.n;
    if (r.has_direct) j["direct"] = {r.direct.real(), r.direct.imag()};
    j["closed_form_abs"] = r.closed_form_abs;
    j["bound"] = r.bound;
    std::cout << j.dump(2) << '\n';
  });

  // fourier
  auto* fourier = app.add_subcommand("fourier", "indicator and boundary transforms");
  fourier->require_subcommand(1);
  BodyOptions f_body;
  std::vector<double> freq{1, 0}, seg{0, 0, 1, 0};
  int n_max = 16, h_n_max = 0;
  std::string decay_out;
  auto* f_chi = fourier->add_subcommand("chi", "transform of window ∩ body at one frequency");
  auto* f_seg = fourier->add_subcommand("segment", "transform of arclength on a segment");
  auto* f_decay = fourier->add_subcommand("decay", "decay ratios over 0 < |n| <= n_max as CSV");
  f_body.attach(f_chi, true);
  f_body.attach(f_decay, true);
  f_chi->add_option("--n", freq, "n1 n2")->expected(2)->capture_default_str();
  f_seg->add_option("--xi", freq, "xi1 xi2")->expected(2)->capture_default_str();
  f_seg->add_option("--segment", seg, "x1 x2 y1 y2")->expected(4)->capture_default_str();
  f_decay->add_option("--n-max", n_max)->capture_default_str();
  f_decay->add_option("--h-n-max", h_n_max, "also compute H_R up to this radius")->capture_default_str();
  f_decay->add_option("-o,--output", decay_out, "output file (default stdout)");
  f_chi->callback([&] {
    Vec2 n(freq[0], freq[1]);
    Complex sum{};
    double err = 0;
    for (const auto& r : decompose_intersection(f_body.get(), f_body.get_window())) {
      auto s = chi_hat(r.boundary, n);
      sum += s.value;
      err += s.est_abs_error;
    }
    nlohmann::ordered_json j{{"n", freq}, {"re", sum.real()}, {"im", sum.imag()}, {"abs", std::abs(sum)},
                             {"est_abs_error", err}};
    std::cout << j.dump(2) << '\n';
  });
  f_seg->callback([&] {
    Complex v = segment_ft({seg[0], seg[1]}, {seg[2], seg[3]}, {freq[0], freq[1]});
    nlohmann::ordered_json j{{"re", v.real()}, {"im", v.imag()}, {"abs", std::abs(v)}};
    std::cout << j.dump(2) << '\n';
  });
  f_decay->callback([&] {
    auto p = decay_profile(f_body.get(), f_body.get_window(), n_max, h_n_max);
    std::ofstream f;
    write_csv(open_output(decay_out, f), p);
    std::cerr << "max ratio " << p.max_ratio << '\n';
  });

  // integrate
  auto* integ = app.add_subcommand("integrate", "QMC integral of f over the body with a Koksma-Hlawka report");
  PointOptions i_pts;
  BodyOptions i_body;
  std::string terms, terms_file, i_method = "grid";
  i_pts.attach(integ);
  i_body.attach(integ, false);
  auto* t_inline = integ->add_option("--terms", terms, "inline rows, e.g. '[[0, 0, 1, 0], [1, 0, 0.5, 0], [-1, 0, 0.5, 0]]'");
  auto* t_file = integ->add_option("--terms-file", terms_file, "config file with an `integrand` entry");
  t_inline->excludes(t_file);
  integ->add_option("--method", i_method, "grid | oracle")->capture_default_str();
  integ->add_option("--G,--grid", G)->capture_default_str();
  integ->add_option("--depth", depth)->capture_default_str();
  integ->callback([&] {
    TrigPolynomial f;
    if (!terms_file.empty()) {
      auto t = config::parse_file(terms_file);
      const auto& v = config::require(t, "integrand");
      f = TrigPolynomial::from_config(v.is_table() ? config::require(v.as_table("integrand"), "terms", v.line) : v);
    } else if (!terms.empty()) {
      f = TrigPolynomial::from_config(config::parse_value(terms));
    } else {
      throw CLI::ValidationError("integrate", "give --terms or --terms-file");
    }
    auto pts = i_pts.points();
    auto body = i_body.get();
    DiscrepancyEstimate d;
    if (i_method == "oracle") d = sup_oracle_smallN(pts, body);
    else if (i_method == "grid") d = sup_search(pts, body, G, depth);
    else throw CLI::ValidationError("--method", "expected grid or oracle");
    write_json(std::cout, kh_certificate(f, body, pts, d));
  });

  // experiment
  auto* exp = app.add_subcommand("experiment", "run a configured N schedule and write CSV, JSON and SVG reports");
  std::string exp_config, exp_out;
  exp->add_option("config", exp_config, "experiment config file")->required()->check(CLI::ExistingFile);
  exp->add_option("-o,--output", exp_out, "output directory (overrides the config and $TQMC_OUTPUT_ROOT)");
  exp->callback([&] {
    auto cfg = ExperimentConfig::from_file(exp_config);
    std::filesystem::path dir = exp_out.empty() ? resolve_output_dir(cfg) : std::filesystem::path(exp_out);
    auto r = run_experiment(cfg, dir);
    for (const auto& row : r.rows) std::cout << "N=" << row.N << " D=" << row.disc.value << '\n';
    if (r.fit) {
      std::cout << "slope " << r.fit->slope;
      if (r.fit->has_log_corrected) std::cout << " log-corrected " << r.fit->lc_slope;
      std::cout << '\n';
    }
    std::cout << "wrote " << dir.string() << '\n';
  });

  // fit
  auto* fit = app.add_subcommand("fit", "log-log rate fit of a CSV column against N");
  std::string fit_csv, fit_col = "value", fit_svg;
  fit->add_option("csv", fit_csv, "CSV with an N column")->required()->check(CLI::ExistingFile);
  fit->add_option("--column", fit_col, "value column")->capture_default_str();
  fit->add_option("--svg", fit_svg, "also write a plot");
  fit->callback([&] {
    std::ifstream in(fit_csv);
    auto rows = read_rate_csv(in, fit_col);
    auto r = fit_rate(rows);
    std::cout << fit_to_json(r).dump(2) << '\n';
    if (!fit_svg.empty()) {
      std::ofstream f(fit_svg, std::ios::binary);
      emit_plot(f, rows, r, fit_col);
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const config::ParseError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
