// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "crossvar/config.hpp"
#include "crossvar/constants.hpp"
#include "crossvar/fbm.hpp"
#include "crossvar/h0test.hpp"
#include "crossvar/lab.hpp"
#include "crossvar/model.hpp"
#include "crossvar/moments.hpp"
#include "crossvar/path_io.hpp"
#include "crossvar/seeding.hpp"
#include "crossvar/stats.hpp"
#include "crossvar/young.hpp"

namespace fs = std::filesystem;
using namespace crossvar;
using fbm::Hurst;

namespace {

const fs::path kConfigs = CROSSVAR_CONFIG_DIR;
const fs::path kWork = fs::path(CROSSVAR_TEST_TMP) / "acceptance";

int failures = 0;

std::string num(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

void verdict(int id, bool ok, const std::string& name, const std::string& detail) {
  if (!ok) ++failures;
  std::printf("AC%02d %s %s: %s\n", id, ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
}

lab::ExperimentReport run_config(const std::string& name) {
  const auto cfg = lab::load_config(kConfigs / (name + ".json"));
  auto report = lab::run_experiment(cfg);
  lab::write_report_files(kWork / name, report);
  return report;
}

const lab::Criterion* find_criterion(const lab::ExperimentReport& r, const std::string& prefix) {
  for (const auto& c : r.criteria) {
    if (c.id.rfind(prefix, 0) == 0) return &c;
  }
  return nullptr;
}

std::string describe(const lab::Criterion& c) {
  return c.id + " = " + num(c.value) + " " + c.comparison + " " + num(c.threshold);
}

// 1. empirical covariance of B on t_k = k/16 against the exact covariance
void ac01_generator() {
  double worst_all = 0.0;
  std::string detail;
  for (double h : {0.55, 0.6, 0.75, 0.85}) {
    const Hurst hurst(h);
    constexpr std::size_t K = 16;
    constexpr std::size_t M = 5000;
    std::vector<double> acc(K * K, 0.0);
    for (std::size_t r = 0; r < M; ++r) {
      const auto p = fbm::generate_fbm_path(hurst, K, 1.0, replicate_seed(101, r));
      for (std::size_t i = 0; i < K; ++i) {
        for (std::size_t j = 0; j < K; ++j) acc[i * K + j] += p[i + 1] * p[j + 1];
      }
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < K; ++i) {
      for (std::size_t j = 0; j < K; ++j) {
        const double exact = fbm::fbm_covariance(hurst, (i + 1) / 16.0, (j + 1) / 16.0);
        worst = std::max(worst, std::abs(acc[i * K + j] / M - exact));
      }
    }
    worst_all = std::max(worst_all, worst);
    detail += "H=" + num(h) + ":" + num(worst) + " ";
  }
  verdict(1, worst_all <= 0.05, "generator fidelity",
          "max |cov - exact| " + detail + "<= 0.05 (M=5000, 16-point grid)");
}

// 2. (d beta1)^2 - (d beta2)^2 = 2 dB1 dB2 pointwise. The error is taken relative to
// the mean of (d beta1)^2 + (d beta2)^2 over the grid: increments come from differences
// of path values, so their rounding is eps |beta| and not eps |d beta|.
void ac02_rotation() {
  const std::size_t N = std::size_t{1} << 14;
  double worst = 0.0, worst_own = 0.0;
  std::string per_h;
  for (double h : {0.6, 0.85}) {
    const auto [b1, b2] = fbm::generate_bivariate_fbm(Hurst(h), N, 1.0, 202);
    const auto [beta1, beta2] = fbm::rotate(b1, b2);
    std::vector<double> err(N + 1, 0.0);
    double scale = 0.0;
    for (std::size_t k = 1; k <= N; ++k) {
      const double d1 = beta1[k] - beta1[k - 1];
      const double d2 = beta2[k] - beta2[k - 1];
      const double rhs = 2.0 * (b1[k] - b1[k - 1]) * (b2[k] - b2[k - 1]);
      err[k] = std::abs(d1 * d1 - d2 * d2 - rhs);
      scale += (d1 * d1 + d2 * d2) / static_cast<double>(N);
      if (d1 * d1 + d2 * d2 > 0.0) worst_own = std::max(worst_own, err[k] / (d1 * d1 + d2 * d2));
    }
    const double here = *std::max_element(err.begin(), err.end()) / scale;
    per_h += " H=" + num(h) + ":" + num(here);
    worst = std::max(worst, here);
  }
  verdict(2, worst <= 1e-12, "rotation identity",
          "max pointwise error / mean squared increment" + per_h + " <= 1e-12 (N=2^14; against each increment's own square " +
              num(worst_own) + "). Increments of the rotated paths are differences of path values of size ~1, " +
              "so double rounding alone leaves ~eps/|dB| relative error on increments of size N^-H");
}

// 3. first-order limit with sigma11=1, sigma12=s, sigma21=cos s, sigma22=2
void ac03_theorem1() {
  const auto r = run_config("theorem1_limit");
  const double stated = 2.18294;  // 1/2 + 2 sin 1
  const double model = 1.0 + std::sin(1.0);
  const auto* c4096 = r.find_cell("n^(2H-1)J_n", 4096, 1.0);
  const double mean = c4096->moments.mean;
  // exceedance of eps = 0.1 around the stated value along n = 2^9, 2^11, 2^13
  std::vector<double> exceed_stated, exceed_model;
  for (std::size_t n : {512u, 2048u, 8192u}) {
    std::size_t hits = 0, hits_model = 0, count = 0;
    for (const auto& row : r.replicates) {
      if (row.n != n) continue;
      ++count;
      hits += std::abs(row.value - stated) > 0.1 ? 1 : 0;
      hits_model += std::abs(row.value - model) > 0.1 ? 1 : 0;
    }
    exceed_stated.push_back(static_cast<double>(hits) / count);
    exceed_model.push_back(static_cast<double>(hits_model) / count);
  }
  const bool mono_stated = std::is_sorted(exceed_stated.rbegin(), exceed_stated.rend());
  const bool mono_model = std::is_sorted(exceed_model.rbegin(), exceed_model.rend());
  const bool ok = std::abs(mean - stated) <= 0.05 && mono_stated;
  std::string detail = "mean(n=4096) = " + num(mean) + ", |mean - 2.18294| = " + num(std::abs(mean - stated)) +
                       " <= 0.05; exceedance(eps=0.1) at n=2^9,2^11,2^13 = " + num(exceed_stated[0]) + "," +
                       num(exceed_stated[1]) + "," + num(exceed_stated[2]) +
                       (mono_stated ? " nonincreasing" : " NOT nonincreasing");
  if (!ok) {
    detail += ". The stated value pairs sigma11 sigma12 + sigma21 sigma22; the model X^i = x_i + sum_j "
              "int sigma^{i,j} dB^j has limit int (sigma11 sigma21 + sigma12 sigma22) = 1 + sin 1 = " +
              num(model) + ", matched within " + num(std::abs(mean - model)) +
              " with exceedance " + num(exceed_model[0]) + "," + num(exceed_model[1]) + "," +
              num(exceed_model[2]) + (mono_model ? " nonincreasing" : " NOT nonincreasing") +
              " (lab gates against this limit: " + (r.passed() ? "pass" : "fail") + ")";
  }
  verdict(3, ok, "first-order limit", detail);
}

void ac04_theorem1_null() {
  const auto r = run_config("theorem1_null");
  const auto* c = find_criterion(r, "mean_se[n=4096");
  const auto* cell = r.find_cell("n^(2H-1)J_n", 4096, 1.0);
  verdict(4, c && c->passed, "first-order null case",
          "mean = " + num(cell->moments.mean) + " (SE " + num(cell->moments.se_mean) + "), " + describe(*c));
}

void ac05_theorem2() {
  const auto r = run_config("theorem2_gaussian");
  const auto* z = r.find_cell("a_nJ_n", 4096, 1.0);
  const auto* v1 = r.find_cell("a_nJ_n", 1024, 1.0);
  const auto* v4 = r.find_cell("a_nJ_n", 4096, 1.0);
  const double skew = std::abs(z->moments.skewness);
  const double kurt = std::abs(z->moments.excess_kurtosis);
  const double spread = std::abs(v1->moments.variance - v4->moments.variance) /
                        std::min(v1->moments.variance, v4->moments.variance);
  std::string match = "none";
  double err_root = 0.0, err_unrooted = 0.0, empirical = 0.0;
  for (const auto& e : r.findings["scale_calibration"]) {
    if (e["t"].get<double>() != 1.0) continue;
    match = e["matching_candidate"].get<std::string>();
    err_root = e["relative_error_square_root"].get<double>();
    err_unrooted = e["relative_error_unrooted"].get<double>();
    empirical = e["empirical_scale"].get<double>();
  }
  const bool ok = skew < 0.15 && kurt < 0.3 && spread <= 0.10 && match != "none";
  verdict(5, ok, "gaussian limit below H = 3/4",
          "|skew| = " + num(skew) + " < 0.15, |excess kurtosis| = " + num(kurt) + " < 0.3, var(1024) vs var(4096) " +
              num(spread) + " <= 0.10; empirical sd " + num(empirical) + " matches '" + match +
              "' (rel. err square-root " + num(err_root) + ", unrooted C_H/2 " + num(err_unrooted) + ")");
}

void ac06_critical() {
  const auto r = run_config("critical");
  const auto* c = find_criterion(r, "variance_stability");
  std::string vars;
  for (const auto& v : r.findings["variance_stability"][0]["variances"]) vars += num(v["variance"].get<double>()) + " ";
  verdict(6, c && c->passed, "critical regime variance stability",
          "variances at n=2^10,2^12,2^14: " + vars + "; " + describe(*c));
}

void ac07_supercritical() {
  const auto r = run_config("supercritical");
  const auto* taqqu = find_criterion(r, "cauchy_decrease[taqqu");
  const auto* nj = find_criterion(r, "cauchy_decrease[nJ_n");
  const auto* kurt = find_criterion(r, "terminal_kurtosis");
  const bool ok = taqqu && nj && kurt && taqqu->passed && nj->passed && kurt->passed;
  verdict(7, ok, "supercritical dyadic Cauchy",
          "min margin (SE) taqqu " + num(taqqu->value) + " > 2, nJ_n " + num(nj->value) +
              " > 2; excess kurtosis of nJ_n(1) at n=2^13 " + num(kurt->value) + " > 0.2");
}

void ac08_lemma1() {
  const auto r = run_config("lemma1_rates");
  const auto* e2 = find_criterion(r, "slope_e2");
  const auto* e1 = find_criterion(r, "slope_e1");
  const double s2 = r.findings["slope_e2"]["slope"].get<double>();
  verdict(8, e1 && e2 && e1->passed && e2->passed, "cell integral rates",
          "slope(full) = " + num(s2) + " (|slope + H| = " + num(e2->value) + " <= 0.15), slope(centered) = " +
              num(e1->value) + " <= -2 alpha + 0.15 = " + num(e1->threshold));
}

void ac09_lemma2() {
  const auto r = run_config("lemma2_deterministic");
  const auto* c = find_criterion(r, "abs_error[n=10000");
  const auto* cell = r.find_cell("weighted_quadratic_sum", 10000, 1.0);
  verdict(9, c && c->passed, "weighted quadratic sum",
          "value = " + num(cell->moments.mean) + " vs sin(1) = 0.841471, " + describe(*c));
}

void ac10_h2() {
  bool ok = true;
  std::string detail;
  for (double h : {0.6, 0.8}) {
    const Hurst hurst(h);
    const std::size_t n = 256;
    const double a = stats::rate_a_n(hurst, n);
    const std::size_t i = 64, j = 192;
    std::vector<double> full, part;
    for (std::size_t r = 0; r < 10000; ++r) {
      const auto [b1, b2] = fbm::generate_bivariate_fbm(hurst, n, 1.0, replicate_seed(1010, r));
      double s = 0.0, w = 0.0;
      for (std::size_t k = 1; k <= n; ++k) {
        const double xi = a * (b1[k] - b1[k - 1]) * (b2[k] - b2[k - 1]);
        s += xi;
        if (k > i && k <= j) w += xi;
      }
      full.push_back(s * s);
      part.push_back(w * w);
    }
    const auto mf = stats::sample_moments(full);
    const auto mp = stats::sample_moments(part);
    const double zf = std::abs(mf.mean - stats::xi_second_moment(hurst, n, 0, n)) / mf.se_mean;
    const double zp = std::abs(mp.mean - stats::xi_second_moment(hurst, n, i, j)) / mp.se_mean;
    const std::vector<std::size_t> grid{256, 1024, 4096};
    const auto h2 = stats::h2_bound_check(hurst, grid);
    ok = ok && zf <= 3.0 && zp <= 3.0 && h2.spread <= 0.2;
    detail += "H=" + num(h) + ": MC deviation " + num(zf) + "," + num(zp) + " SE <= 3, C spread " + num(h2.spread) +
              " <= 0.2; ";
  }
  verdict(10, ok, "second-moment bound", detail);
}

void ac11_young() {
  const double exact = 0.5 + std::sin(2.0) / 4.0;
  auto integral = [](std::size_t n) {
    const auto f = fbm::sample_function([](double t) { return std::cos(t); }, n, 1.0);
    const auto g = fbm::sample_function([](double t) { return std::sin(t); }, n, 1.0);
    return young::young_integrate(f, g)[n];
  };
  // the left-point error is c/n - O(1/n^2), so the order approaches 1 from below;
  // the gate takes the finest pair and asks for 1 to two decimals
  double min_order = 10.0, fine_order = 0.0;
  double prev = std::abs(integral(64) - exact);
  double err = prev;
  for (std::size_t n = 128; n <= (1u << 14); n *= 2) {
    err = std::abs(integral(n) - exact);
    fine_order = std::log2(prev / err);
    min_order = std::min(min_order, fine_order);
    prev = err;
  }
  // linearity and additivity on fBm integrators
  const std::size_t N = 4096;
  const auto [b1, b2] = fbm::generate_bivariate_fbm(Hurst(0.7), N, 1.0, 1111);
  const auto f1 = fbm::sample_function([](double t) { return std::cos(5 * t); }, N, 1.0);
  const auto f2 = fbm::sample_function([](double t) { return 1 + t; }, N, 1.0);
  std::vector<double> comb(N + 1);
  for (std::size_t k = 0; k <= N; ++k) comb[k] = 3.0 * f1[k] - 2.0 * f2[k];
  const auto lhs = young::young_integrate(fbm::SamplePath(1.0, comb), b1);
  const auto i1 = young::young_integrate(f1, b1);
  const auto i2 = young::young_integrate(f2, b1);
  double lin = 0.0, chasles = 0.0;
  for (std::size_t k = 1; k <= N; ++k) {
    const double want = 3.0 * i1[k] - 2.0 * i2[k];
    lin = std::max(lin, std::abs(lhs[k] - want) / std::max(1.0, std::abs(want)));
  }
  const auto whole = young::young_integrate(f1, b2);
  for (std::size_t a : {0u, 1000u, 2048u}) {
    for (std::size_t b : {2500u, 3000u, 4096u}) {
      double piece = 0.0;
      for (std::size_t k = a; k < b; ++k) piece += f1[k] * (b2[k + 1] - b2[k]);
      chasles = std::max(chasles, std::abs(whole[b] - whole[a] - piece) / std::max(1.0, std::abs(whole[b])));
    }
  }
  const bool ok = fine_order >= 0.995 && err < 2e-5 && lin <= 1e-12 && chasles <= 1e-12;
  verdict(11, ok, "young integrator",
          "int cos d(sin) error at 2^14 = " + num(err) + ", empirical order (2^13 to 2^14) " + num(fine_order) +
              " = 1.00 to two decimals (smallest over 2^6..2^14: " + num(min_order) + "); linearity " + num(lin) +
              ", additivity " + num(chasles) + " <= 1e-12");
}

void ac12_h0test() {
  const Hurst h(0.6);
  const std::size_t n = 4096, M = 1000;
  const double alpha = young::default_holder_exponent(h);
  const auto null_sigma = young::SigmaSpec::identity(alpha);
  auto alt_sigma = null_sigma;
  alt_sigma(1, 2) = young::Coefficient::constant(0.5);
  std::size_t rejects = 0, power_hits = 0, abstain = 0;
  double equivariance = 0.0;
  std::vector<double> stats_null;
  for (std::size_t r = 0; r < M; ++r) {
    const auto x = young::simulate_model(null_sigma, h, n, 1.0, replicate_seed(1212, r), 1);
    const auto res = h0::test_zero_cross(x.x1, x.x2, n, h);
    if (!res.statistic) {
      ++abstain;
      continue;
    }
    stats_null.push_back(*res.statistic);
    rejects += res.decision == h0::Decision::reject ? 1 : 0;
    if (r < 50) {
      std::vector<double> v(x.x1.values().begin(), x.x1.values().end());
      for (double& e : v) e *= 7.25;
      const auto scaled = h0::test_zero_cross(fbm::SamplePath(1.0, v), x.x2, n, h);
      equivariance = std::max(equivariance, std::abs(*scaled.statistic - *res.statistic) / std::abs(*res.statistic));
    }
    const auto y = young::simulate_model(alt_sigma, h, n, 1.0, replicate_seed(1213, r), 1);
    power_hits += h0::test_zero_cross(y.x1, y.x2, n, h).decision == h0::Decision::reject ? 1 : 0;
  }
  const double size = static_cast<double>(rejects) / M;
  const double power = static_cast<double>(power_hits) / M;
  const double var = stats::sample_moments(stats_null).variance;
  const bool ok = abstain == 0 && size >= 0.03 && size <= 0.07 && power >= 0.9 && equivariance <= 1e-10;
  verdict(12, ok, "hypothesis test",
          "size = " + num(size) + " in [0.03, 0.07], power = " + num(power) + " >= 0.9, scale equivariance " +
              num(equivariance) + " <= 1e-10 (null statistic variance " + num(var) + ")");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int cli(const std::string& args) {
  const std::string cmd = std::string(CROSSVAR_CLI_PATH) + " " + args + " > /dev/null 2>&1 < /dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void ac13_reproducibility() {
  bool ok = true;
  std::string detail;
  for (const char* name : {"theorem2_gaussian", "supercritical", "lemma1_rates"}) {
    const fs::path a = kWork / "repro" / (std::string(name) + "_j1");
    const fs::path b = kWork / "repro" / (std::string(name) + "_j4");
    fs::remove_all(a);
    fs::remove_all(b);
    cli("experiment -j 1 -c " + (kConfigs / (std::string(name) + ".json")).string() + " -o " + a.string());
    cli("experiment -j 4 --manifest " + (a / "manifest.json").string() + " -o " + b.string());
    const bool same = fs::exists(a / "report.json") && fs::exists(b / "report.json") &&
                      slurp(a / "report.json") == slurp(b / "report.json") &&
                      slurp(a / "replicates.csv") == slurp(b / "replicates.csv");
    ok = ok && same;
    detail += std::string(name) + (same ? " identical; " : " DIFFERS; ");
  }
  verdict(13, ok, "reproducibility",
          detail + "(rerun from manifest with 4 workers vs 1 worker, byte compare of report.json and replicates.csv)");
}

}  // namespace

int main() {
  fs::create_directories(kWork);
  const std::vector<void (*)()> checks{ac01_generator, ac02_rotation,   ac03_theorem1, ac04_theorem1_null,
                                       ac05_theorem2,  ac06_critical,   ac07_supercritical, ac08_lemma1,
                                       ac09_lemma2,    ac10_h2,         ac11_young,    ac12_h0test,
                                       ac13_reproducibility};
  int id = 1;
  for (auto check : checks) {
    try {
      check();
    } catch (const std::exception& e) {
      verdict(id, false, "criterion", std::string("threw: ") + e.what());
    }
    ++id;
  }
  std::printf("%d of 13 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
