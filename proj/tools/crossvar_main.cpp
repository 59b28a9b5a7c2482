// crossvar command-line front end: simulate, experiment, test, constants.

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "crossvar/config.hpp"
#include "crossvar/constants.hpp"
#include "crossvar/errors.hpp"
#include "crossvar/h0test.hpp"
#include "crossvar/lab.hpp"
#include "crossvar/model.hpp"
#include "crossvar/path_io.hpp"
#include "crossvar/young.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace crossvar;

namespace {

// exit codes
constexpr int kOk = 0;
constexpr int kGateFailed = 1;
constexpr int kUsage = 2;
constexpr int kUnsupported = 3;

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

fs::path default_out_dir() {
  if (const char* env = std::getenv("CROSSVAR_OUT_DIR"); env && *env) return env;
  return "crossvar_out";
}

// Written once before the run and rewritten when it finishes.
class Manifest {
 public:
  Manifest(fs::path dir, std::string command) : dir_(std::move(dir)) {
    j_["command"] = std::move(command);
    j_["tool_version"] = CROSSVAR_VERSION;
    j_["started_at"] = utc_now();
    j_["status"] = "running";
  }
  json& operator[](const char* key) { return j_[key]; }
  void add_output(const fs::path& p) { j_["outputs"].push_back(p.filename().string()); }
  void write() const {
    fs::create_directories(dir_);
    std::ofstream out(dir_ / "manifest.json", std::ios::binary);
    out << j_.dump(2) << '\n';
  }
  void finish(const std::string& status) {
    j_["finished_at"] = utc_now();
    j_["status"] = status;
    write();
  }

 private:
  fs::path dir_;
  json j_;
};

struct SimulateArgs {
  double hurst = 0.0;
  std::size_t intervals = 0;
  double horizon = 1.0;
  std::uint64_t seed = 0;
  std::string format = "csv";
  bool bivariate = false;
  std::string sigma;
  std::size_t oversampling = 1;
  std::string out;
};

int cmd_simulate(const SimulateArgs& a) {
  const fbm::Hurst hurst(a.hurst);
  const fs::path dir = a.out.empty() ? default_out_dir() : fs::path(a.out);
  Manifest manifest(dir, "simulate");
  manifest["master_seed"] = a.seed;
  json params;
  params["hurst"] = a.hurst;
  params["intervals"] = a.intervals;
  params["horizon"] = a.horizon;
  params["format"] = a.format;
  params["bivariate"] = a.bivariate;
  json sigma_json = nullptr;
  if (!a.sigma.empty()) {
    std::ifstream in(a.sigma);
    if (!in) throw IngestionError("cannot open sigma file " + a.sigma);
    try {
      sigma_json = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw IngestionError("sigma file " + a.sigma + ": " + e.what());
    }
    params["sigma"] = sigma_json;
    params["oversampling"] = a.oversampling;
  }
  manifest["config"] = params;
  manifest["config_digest"] = lab::config_digest(nlohmann::json::parse(params.dump()));
  manifest["outputs"] = json::array();
  manifest.write();

  auto emit = [&](const fbm::SamplePath& p, const std::string& stem) {
    const fs::path file = dir / (stem + (a.format == "bin" ? ".bin" : ".csv"));
    if (a.format == "bin") {
      io::write_path_binary(file, p);
    } else {
      io::write_path_csv(file, p);
    }
    manifest.add_output(file);
  };

  if (!sigma_json.is_null()) {
    const auto sigma = young::sigma_from_json(sigma_json, hurst);
    const auto model = young::simulate_model(sigma, hurst, a.intervals, a.horizon, a.seed, a.oversampling);
    const fs::path file = dir / "increments.csv";
    std::ofstream out(file, std::ios::binary);
    io::write_increments_csv(out, model.x1, model.x2);
    manifest.add_output(file);
    emit(model.x1, "x1");
    emit(model.x2, "x2");
  } else if (a.bivariate) {
    const auto [b1, b2] = fbm::generate_bivariate_fbm(hurst, a.intervals, a.horizon, a.seed);
    emit(b1, "path1");
    emit(b2, "path2");
  } else {
    emit(fbm::generate_fbm_path(hurst, a.intervals, a.horizon, a.seed), "path");
  }
  manifest.finish("completed");
  return kOk;
}

struct ExperimentArgs {
  std::string config;
  std::string manifest;
  std::string out;
  std::size_t workers = 1;
  bool dry_run = false;
};

int cmd_experiment(const ExperimentArgs& a) {
  nlohmann::json source;
  if (!a.manifest.empty()) {
    std::ifstream in(a.manifest);
    if (!in) throw IngestionError("cannot open manifest " + a.manifest);
    const auto m = nlohmann::json::parse(in);
    if (!m.contains("config")) throw IngestionError("manifest has no config");
    source = m.at("config");
  } else {
    std::ifstream in(a.config);
    if (!in) throw IngestionError("cannot open config " + a.config);
    try {
      source = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw IngestionError("config " + a.config + ": " + e.what());
    }
  }
  const auto cfg = lab::parse_config(source);
  if (a.dry_run) {
    json echo;
    echo["valid"] = true;
    echo["config_digest"] = lab::config_digest(source);
    echo["config"] = lab::to_json(cfg);
    std::cout << echo.dump(2) << '\n';
    return kOk;
  }
  const fs::path dir = a.out.empty() ? default_out_dir() : fs::path(a.out);
  Manifest manifest(dir, "experiment");
  manifest["config_digest"] = lab::config_digest(source);
  manifest["master_seed"] = cfg.seed;
  manifest["workers"] = a.workers;
  manifest["config"] = source;
  manifest["outputs"] = json::array();
  manifest.write();

  const auto report = lab::run_experiment(cfg, lab::RunOptions{a.workers});
  lab::write_report_files(dir, report);
  manifest.add_output(dir / "report.json");
  manifest.add_output(dir / "replicates.csv");
  manifest["passed"] = report.passed();
  manifest.finish("completed");

  for (const auto& c : report.criteria) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.id << ": " << io::format_double(c.value) << ' '
              << c.comparison << ' ' << io::format_double(c.threshold) << '\n';
  }
  std::cout << (report.passed() ? "all gated criteria passed" : "some gated criteria failed") << '\n';
  return report.passed() ? kOk : kGateFailed;
}

struct TestArgs {
  std::string csv;
  std::string bin1;
  std::string bin2;
  double horizon = 1.0;
  double hurst = 0.0;
  std::size_t n = 0;
  double level = 0.05;
  std::size_t blocks = 0;
  std::string scale = "exact_finite_n";
  std::string log_base = "natural";
  bool estimate_hurst = false;
};

int cmd_test(const TestArgs& a) {
  std::optional<fbm::SamplePath> x1, x2;
  if (!a.csv.empty()) {
    auto [p1, p2] = io::paths_from_increments(io::read_increments_csv(fs::path(a.csv)), a.horizon);
    x1.emplace(std::move(p1));
    x2.emplace(std::move(p2));
  } else {
    x1.emplace(io::read_path_binary(fs::path(a.bin1)));
    x2.emplace(io::read_path_binary(fs::path(a.bin2)));
  }
  const fbm::Hurst hurst(a.hurst);
  const std::size_t n =
      a.n ? a.n : static_cast<std::size_t>(std::llround(static_cast<double>(x1->intervals()) / x1->horizon()));
  h0::TestOptions opt;
  opt.level = a.level;
  if (a.blocks) opt.blocks = a.blocks;
  opt.scale = h0::scale_choice_from_string(a.scale);
  opt.log_base = stats::log_base_from_string(a.log_base);
  opt.estimate_hurst = a.estimate_hurst;
  const auto result = h0::test_zero_cross(*x1, *x2, n, hurst, opt);
  std::cout << h0::to_json(result).dump() << '\n';
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
  return kOk;
}

struct ConstantsArgs {
  std::vector<double> hurst{0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85};
  std::vector<std::size_t> n{100, 1024, 4096};
  std::size_t lags = 4;
};

std::string cell(double v, int width = 12) {
  std::ostringstream s;
  s << std::setw(width) << std::setprecision(6) << v;
  return s.str();
}

int cmd_constants(const ConstantsArgs& a) {
  std::cout << "rho(k) = fGn autocovariance\n" << std::setw(6) << "H";
  for (std::size_t k = 0; k <= a.lags; ++k) std::cout << std::setw(12) << ("k=" + std::to_string(k));
  std::cout << '\n';
  for (double h : a.hurst) {
    const fbm::Hurst hu(h);
    std::cout << std::setw(6) << h;
    for (std::size_t k = 0; k <= a.lags; ++k) std::cout << cell(fbm::fgn_autocovariance(hu, static_cast<long long>(k)));
    std::cout << '\n';
  }

  std::cout << "\na_n (natural log at H = 3/4)\n" << std::setw(6) << "H";
  for (std::size_t n : a.n) std::cout << std::setw(12) << ("n=" + std::to_string(n));
  std::cout << '\n';
  for (double h : a.hurst) {
    const fbm::Hurst hu(h);
    std::cout << std::setw(6) << h;
    for (std::size_t n : a.n) {
      if (h > 0.5) {
        std::cout << cell(stats::rate_a_n(hu, n));
      } else {
        std::cout << std::setw(12) << "-";
      }
    }
    std::cout << '\n';
  }

  std::cout << "\nlimit constants\n"
            << std::setw(6) << "H" << std::setw(14) << "S_H" << std::setw(14) << "C_H" << std::setw(14)
            << "sqrt(S_H)" << '\n';
  for (double h : a.hurst) {
    const fbm::Hurst hu(h);
    std::cout << std::setw(6) << h;
    if (h < 0.75) {
      std::cout << cell(stats::breuer_major_series(hu).value, 14);
    } else {
      std::cout << std::setw(14) << "diverges";
    }
    if (h <= 0.75) {
      std::cout << cell(stats::c_constant(hu, stats::ConstantVariant::unrooted).value, 14)
                << cell(stats::c_constant(hu, stats::ConstantVariant::square_root).value, 14);
    } else {
      std::cout << std::setw(14) << "-" << std::setw(14) << "-";
    }
    std::cout << '\n';
  }

  std::cout << "\nYoung constant C(alpha, gamma)\n" << std::setw(8) << "alpha";
  const std::vector<double> gammas{0.55, 0.6, 0.7, 0.8, 0.9};
  for (double g : gammas) std::cout << std::setw(12) << ("g=" + cell(g, 0));
  std::cout << '\n';
  for (double al : {0.55, 0.6, 0.7, 0.8, 0.9}) {
    std::cout << std::setw(8) << al;
    for (double g : gammas) std::cout << cell(young::young_constant(al, g));
    std::cout << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"crossvar: cross-variation statistics of fBm-driven Young integrals"};
  app.set_version_flag("--version", std::string(CROSSVAR_VERSION));
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Generate fBm or model paths");
  s->add_option("--hurst", sim.hurst, "Hurst index in (0,1)")->required();
  s->add_option("-N,--intervals", sim.intervals, "Grid intervals")->required()->check(CLI::Range(std::size_t{2}, std::size_t{1} << 26));
  s->add_option("--horizon", sim.horizon, "Time horizon T")->check(CLI::PositiveNumber);
  s->add_option("--seed", sim.seed, "Master seed");
  s->add_option("--format", sim.format, "csv or bin")->check(CLI::IsMember({"csv", "bin"}));
  s->add_flag("--bivariate", sim.bivariate, "Two independent components");
  s->add_option("--sigma", sim.sigma, "JSON sigma spec; simulates X and writes increments.csv")->check(CLI::ExistingFile);
  s->add_option("--oversampling", sim.oversampling, "Oversampling factor recorded for X")->check(CLI::PositiveNumber);
  s->add_option("-o,--out", sim.out, "Output directory (default $CROSSVAR_OUT_DIR)");

  ExperimentArgs exp;
  auto* e = app.add_subcommand("experiment", "Run a Monte Carlo experiment from a config");
  auto* cfg_opt = e->add_option("-c,--config", exp.config, "Experiment config (JSON)")->check(CLI::ExistingFile);
  auto* man_opt = e->add_option("--manifest", exp.manifest, "Rerun from a manifest.json")->check(CLI::ExistingFile);
  cfg_opt->excludes(man_opt);
  e->add_option("-o,--out", exp.out, "Output directory (default $CROSSVAR_OUT_DIR)");
  e->add_option("-j,--workers", exp.workers, "Worker threads")->check(CLI::Range(std::size_t{1}, std::size_t{256}));
  e->add_flag("--dry-run", exp.dry_run, "Validate the config without sampling");

  TestArgs tst;
  auto* t = app.add_subcommand("test", "Test for a vanishing off-diagonal coefficient");
  auto* csv_opt = t->add_option("--csv", tst.csv, "Two-column increment CSV (dx1,dx2)")->check(CLI::ExistingFile);
  auto* b1_opt = t->add_option("--bin1", tst.bin1, "Binary path dump of X1")->check(CLI::ExistingFile);
  auto* b2_opt = t->add_option("--bin2", tst.bin2, "Binary path dump of X2")->check(CLI::ExistingFile);
  b1_opt->needs(b2_opt);
  b2_opt->needs(b1_opt);
  csv_opt->excludes(b1_opt);
  t->add_option("--horizon", tst.horizon, "Horizon of the CSV data")->check(CLI::PositiveNumber);
  t->add_option("--hurst", tst.hurst, "Hurst index")->required();
  t->add_option("-n,--resolution", tst.n, "Statistic resolution n (default: data grid)");
  t->add_option("--level", tst.level, "Test level");
  t->add_option("--blocks", tst.blocks, "Block count L (must divide n)");
  t->add_option("--scale", tst.scale, "Reference scale")->check(CLI::IsMember({"exact_finite_n", "square_root", "unrooted"}));
  t->add_option("--log-base", tst.log_base, "Log base in a_n at H = 3/4")->check(CLI::IsMember({"natural", "2", "10"}));
  t->add_flag("--estimate-hurst", tst.estimate_hurst, "Plug in an estimated H");

  ConstantsArgs con;
  auto* c = app.add_subcommand("constants", "Print tables of rho, a_n and the limit constants");
  c->add_option("--hurst", con.hurst, "Hurst values");
  c->add_option("--n", con.n, "Resolutions for a_n");
  c->add_option("--lags", con.lags, "Largest lag for rho");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    return app.exit(err) == 0 ? kOk : kUsage;
  }

  try {
    if (*s) return cmd_simulate(sim);
    if (*e) {
      if (exp.config.empty() && exp.manifest.empty()) {
        std::cerr << "error: experiment needs --config or --manifest\n";
        return kUsage;
      }
      return cmd_experiment(exp);
    }
    if (*t) {
      if (tst.csv.empty() && tst.bin1.empty()) {
        std::cerr << "error: test needs --csv or --bin1/--bin2\n";
        return kUsage;
      }
      return cmd_test(tst);
    }
    if (*c) return cmd_constants(con);
  } catch (const UnsupportedRegime& err) {
    std::cerr << "unsupported regime: " << err.what() << '\n';
    return kUnsupported;
  } catch (const IngestionError& err) {
    std::cerr << "ingestion error: " << err.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& err) {
    std::cerr << "usage error: " << err.what() << '\n';
    return kUsage;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
