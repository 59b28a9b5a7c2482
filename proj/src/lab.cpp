#include "crossvar/lab.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>

#include "crossvar/constants.hpp"
#include "crossvar/errors.hpp"
#include "crossvar/model.hpp"
#include "crossvar/path_io.hpp"
#include "crossvar/seeding.hpp"

namespace crossvar::lab {
namespace {

using json = nlohmann::ordered_json;
using stats::Normalization;

// Stream tags for derived seeds; never collide with replicate indices in practice.
constexpr std::uint64_t kReferenceStream = 0x7265666572656e63ULL;
constexpr std::uint64_t kLevelStream = 0x6c6576656c000000ULL;

double integrate(const std::function<double(double)>& f, double a, double b) {
  if (b <= a) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-14);
}

std::string fmt_n(std::size_t n) { return "n=" + std::to_string(n); }

std::string fmt_t(double t) { return "t=" + io::format_double(t); }

json provenance(const ExperimentConfig& cfg) {
  json p;
  p["tool"] = "crossvar";
  p["version"] = CROSSVAR_VERSION;
  p["config_digest"] = config_digest(cfg.source);
  p["config"] = to_json(cfg);
  return p;
}

json regime_echo(const ExperimentConfig& cfg, bool uses_sigma) {
  const fbm::Hurst hurst(cfg.hurst);
  json r;
  r["hurst"] = cfg.hurst;
  r["regime"] = fbm::to_string(hurst.regime());
  r["long_memory"] = cfg.hurst > 0.5;
  if (uses_sigma) {
    const double lo = 0.25 + cfg.hurst / 2.0;
    const double alpha = cfg.sigma.holder_exponent;
    r["assumption_a"] = {{"alpha", alpha},
                         {"lower", lo},
                         {"upper", cfg.hurst},
                         {"holds", alpha > lo && alpha < cfg.hurst}};
    r["sigma_deterministic"] = cfg.sigma.deterministic();
    r["sigma_diagonal"] = cfg.sigma.diagonal();
  }
  if (cfg.weight) {
    r["weight_holder_exponent"] = cfg.weight_holder_exponent;
    r["weight_exponent_above_half"] = cfg.weight_holder_exponent > 0.5;
  }
  return r;
}

ExperimentReport new_report(const ExperimentConfig& cfg, bool uses_sigma) {
  ExperimentReport rep;
  rep.experiment = std::string(to_string(cfg.experiment));
  rep.provenance = provenance(cfg);
  rep.regime = regime_echo(cfg, uses_sigma);
  return rep;
}

// values[r][cell] where cell = ni * T + ti
struct Grid {
  std::vector<std::size_t> n;
  std::vector<double> t;
  std::size_t index(std::size_t ni, std::size_t ti) const { return ni * t.size() + ti; }
  std::size_t size() const { return n.size() * t.size(); }
};

std::vector<double> column(const std::vector<std::vector<double>>& values, std::size_t cell) {
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& row : values) out.push_back(row[cell]);
  return out;
}

void add_replicate_rows(ExperimentReport& rep, const Grid& grid,
                        const std::vector<std::vector<double>>& values, const std::string& statistic,
                        const std::string& normalization) {
  for (std::size_t r = 0; r < values.size(); ++r) {
    for (std::size_t ni = 0; ni < grid.n.size(); ++ni) {
      for (std::size_t ti = 0; ti < grid.t.size(); ++ti) {
        rep.replicates.push_back(
            {r, grid.n[ni], grid.t[ti], statistic, normalization, values[r][grid.index(ni, ti)]});
      }
    }
  }
}

// Fitted Gaussian reference sample for the KS distance, drawn from a stream
// derived from the master seed and the cell.
double ks_to_gaussian(const std::vector<double>& x, const stats::SampleMoments& m,
                      std::uint64_t master, std::size_t cell) {
  std::mt19937_64 engine(mix_seed(mix_seed(master, kReferenceStream), cell));
  std::normal_distribution<double> normal(m.mean, std::sqrt(std::max(m.variance, 0.0)));
  std::vector<double> ref(x.size());
  for (double& v : ref) v = normal(engine);
  return stats::ks_distance(x, std::move(ref));
}

double max_pairwise_spread(const std::vector<double>& v) {
  double worst = 0.0;
  for (std::size_t a = 0; a < v.size(); ++a) {
    for (std::size_t b = a + 1; b < v.size(); ++b) {
      worst = std::max(worst, std::abs(v[a] - v[b]) / std::min(v[a], v[b]));
    }
  }
  return worst;
}

// Shared diagnostics for the centered Gaussian-mixture limits (theorem2, prop1).
struct MixedNormalInput {
  std::string statistic;
  std::string normalization;
  Grid grid;
  std::vector<std::vector<double>> values;    // [r][cell]
  std::vector<std::vector<double>> q;         // [r][ti]: conditional variance integral
  std::vector<double> conditioning;           // [r]: variable for the two-bin split
  std::vector<double> exact_variance;         // [ni] for t = horizon when available
};

void mixed_normal_diagnostics(ExperimentReport& rep, const ExperimentConfig& cfg,
                              MixedNormalInput& in) {
  const fbm::Hurst hurst(cfg.hurst);
  const Tolerances& tol = cfg.tolerances;
  const Grid& grid = in.grid;
  const std::size_t M = in.values.size();
  const std::size_t last = grid.n.size() - 1;

  // studentized copy z = stat / sqrt(q)
  std::vector<std::vector<double>> z(M, std::vector<double>(grid.size()));
  for (std::size_t r = 0; r < M; ++r) {
    for (std::size_t ni = 0; ni < grid.n.size(); ++ni) {
      for (std::size_t ti = 0; ti < grid.t.size(); ++ti) {
        const std::size_t c = grid.index(ni, ti);
        const double q = in.q[r][ti];
        z[r][c] = q > 0.0 ? in.values[r][c] / std::sqrt(q) : 0.0;
      }
    }
  }

  for (std::size_t ni = 0; ni < grid.n.size(); ++ni) {
    for (std::size_t ti = 0; ti < grid.t.size(); ++ti) {
      const std::size_t c = grid.index(ni, ti);
      const auto x = column(in.values, c);
      CellSummary cell;
      cell.statistic = in.statistic;
      cell.normalization = in.normalization;
      cell.n = grid.n[ni];
      cell.t = grid.t[ti];
      cell.moments = stats::sample_moments(x);
      cell.reference = 0.0;
      cell.ks_distance = ks_to_gaussian(x, cell.moments, cfg.seed, c);
      rep.cells.push_back(cell);

      const auto zx = column(z, c);
      CellSummary zc = cell;
      zc.statistic = in.statistic + "/sqrt(Q)";
      zc.moments = stats::sample_moments(zx);
      zc.ks_distance = ks_to_gaussian(zx, zc.moments, cfg.seed, grid.size() + c);
      rep.cells.push_back(zc);

      const std::string where = fmt_n(cell.n) + "," + fmt_t(cell.t);
      if (tol.mean_se) {
        const double dev = std::abs(cell.moments.mean) / cell.moments.se_mean;
        rep.criteria.push_back(make_criterion("mean_centered[" + where + "]",
                                              "|mean| in standard errors", dev, "<=", *tol.mean_se));
      }
      if (tol.mean_abs) {
        rep.criteria.push_back(make_criterion("mean_abs[" + where + "]", "|mean|",
                                              std::abs(cell.moments.mean), "<=", *tol.mean_abs));
      }
      if (ni == last) {
        if (tol.skewness) {
          rep.criteria.push_back(make_criterion("skewness[" + where + "]",
                                                "|skewness| of the studentized statistic",
                                                std::abs(zc.moments.skewness), "<", *tol.skewness));
        }
        if (tol.excess_kurtosis) {
          rep.criteria.push_back(make_criterion(
              "excess_kurtosis[" + where + "]", "|excess kurtosis| of the studentized statistic",
              std::abs(zc.moments.excess_kurtosis), "<", *tol.excess_kurtosis));
        }
      }
    }
  }

  // variance self-consistency across n
  json stability = json::array();
  for (std::size_t ti = 0; ti < grid.t.size(); ++ti) {
    std::vector<double> vars;
    json per_n = json::array();
    for (std::size_t ni = 0; ni < grid.n.size(); ++ni) {
      const auto zx = column(z, grid.index(ni, ti));
      const double v = stats::sample_moments(zx).variance;
      vars.push_back(v);
      per_n.push_back({{"n", grid.n[ni]}, {"variance", v}});
    }
    const double spread = max_pairwise_spread(vars);
    stability.push_back({{"t", grid.t[ti]}, {"variances", per_n}, {"max_relative_spread", spread}});
    if (tol.variance_stability && grid.n.size() > 1) {
      rep.criteria.push_back(make_criterion("variance_stability[" + fmt_t(grid.t[ti]) + "]",
                                            "max pairwise |v_a - v_b| / min(v_a, v_b) across n",
                                            spread, "<=", *tol.variance_stability));
    }
  }
  rep.findings["variance_stability"] = stability;

  // empirical scale against the candidate constants
  if (hurst.regime() != fbm::Regime::supercritical) {
    const auto unrooted = stats::c_constant(hurst, stats::ConstantVariant::unrooted);
    const auto root = stats::c_constant(hurst, stats::ConstantVariant::square_root);
    // a_n with log base b multiplies the statistic by sqrt(ln b) at H = 3/4
    double base_factor = 1.0;
    if (hurst.regime() == fbm::Regime::critical) {
      if (cfg.log_base == stats::LogBase::two) base_factor = std::sqrt(std::numbers::ln2);
      if (cfg.log_base == stats::LogBase::ten) base_factor = std::sqrt(std::numbers::ln10);
    }
    const double cand_unrooted = unrooted.value / 2.0 * base_factor;
    const double cand_root = root.value / 2.0 * base_factor;
    json scale = json::array();
    for (std::size_t ti = 0; ti < grid.t.size(); ++ti) {
      const std::size_t c = grid.index(last, ti);
      const auto x = column(in.values, c);
      double mean_q = 0.0;
      for (std::size_t r = 0; r < M; ++r) mean_q += in.q[r][ti];
      mean_q /= static_cast<double>(M);
      if (!(mean_q > 0.0)) continue;
      // second moment about zero: the limit is centered
      double m2 = 0.0;
      for (double v : x) m2 += v * v;
      m2 /= static_cast<double>(M);
      const double empirical = std::sqrt(m2 / mean_q);
      const double err_unrooted = std::abs(empirical - cand_unrooted) / cand_unrooted;
      const double err_root = std::abs(empirical - cand_root) / cand_root;
      std::string match = "none";
      if (tol.constant_match) {
        if (err_root <= *tol.constant_match && err_root <= err_unrooted) {
          match = "square_root";
        } else if (err_unrooted <= *tol.constant_match) {
          match = "unrooted";
        }
      }
      json e;
      e["t"] = grid.t[ti];
      e["n"] = grid.n[last];
      e["empirical_scale"] = empirical;
      e["candidate_unrooted"] = cand_unrooted;
      e["candidate_square_root"] = cand_root;
      e["relative_error_unrooted"] = err_unrooted;
      e["relative_error_square_root"] = err_root;
      if (!in.exact_variance.empty() && ti + 1 == grid.t.size()) {
        e["exact_finite_n_scale"] = std::sqrt(in.exact_variance[last]);
      }
      e["matching_candidate"] = match;
      scale.push_back(e);
      if (tol.constant_match) {
        rep.criteria.push_back(make_criterion(
            "constant_match[" + fmt_t(grid.t[ti]) + "]",
            "smallest relative error of the empirical scale to a candidate constant",
            std::min(err_unrooted, err_root), "<=", *tol.constant_match));
      }
    }
    rep.findings["scale_calibration"] = scale;
  }
  if (!in.exact_variance.empty()) {
    json ev = json::array();
    for (std::size_t ni = 0; ni < grid.n.size(); ++ni) {
      ev.push_back({{"n", grid.n[ni]}, {"t", cfg.horizon}, {"exact_variance", in.exact_variance[ni]}});
    }
    rep.findings["exact_variance"] = ev;
  }

  // independent increments at the largest n (report only)
  if (grid.t.size() >= 2) {
    json inc = json::array();
    for (std::size_t ti = 1; ti < grid.t.size(); ++ti) {
      const auto a = column(in.values, grid.index(last, ti - 1));
      auto b = column(in.values, grid.index(last, ti));
      for (std::size_t r = 0; r < M; ++r) b[r] -= a[r];
      inc.push_back({{"t1", grid.t[ti - 1]}, {"t2", grid.t[ti]},
                     {"correlation", stats::correlation(a, b)}});
    }
    rep.findings["increment_correlation"] = inc;
  }

  // two-bin conditional spread
  if (!in.conditioning.empty()) {
    std::vector<double> sorted = in.conditioning;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(M / 2), sorted.end());
    const double median = sorted[M / 2];
    const std::size_t c = grid.index(last, grid.t.size() - 1);
    std::vector<double> low, high;
    for (std::size_t r = 0; r < M; ++r) {
      (in.conditioning[r] < median ? low : high).push_back(z[r][c]);
    }
    json bins;
    bins["split"] = "median of B1(T)";
    bins["low_count"] = low.size();
    bins["high_count"] = high.size();
    if (low.size() >= 3 && high.size() >= 3) {
      const double v1 = stats::sample_moments(low).variance;
      const double v2 = stats::sample_moments(high).variance;
      const double se = std::sqrt(2.0 / (static_cast<double>(low.size()) - 1.0) +
                                  2.0 / (static_cast<double>(high.size()) - 1.0));
      const double zstat = std::abs(std::log(v1 / v2)) / se;
      bins["variance_low"] = v1;
      bins["variance_high"] = v2;
      bins["log_ratio_z"] = zstat;
      if (cfg.tolerances.stability_z) {
        rep.criteria.push_back(make_criterion("two_bin_stability",
                                              "|log variance ratio| across bins in standard errors",
                                              zstat, "<=", *cfg.tolerances.stability_z));
      }
    }
    rep.findings["two_bin"] = bins;
  }
}

std::vector<double> riemann_q(const std::vector<double>& integrand_sq, double horizon,
                              std::span<const double> tgrid) {
  // left-point sum of the squared integrand on the fine grid up to each t
  const std::size_t N = integrand_sq.size() - 1;
  const double h = horizon / static_cast<double>(N);
  std::vector<double> out;
  for (double t : tgrid) {
    const std::size_t k = stats::floor_count(t / horizon, N);
    stats::CompensatedSum s;
    for (std::size_t i = 0; i < k; ++i) s.add(integrand_sq[i]);
    out.push_back(s.value() * h);
  }
  return out;
}

double c_match_quadrature(const young::Coefficient& c, double t) {
  return integrate([&](double s) { const double v = c.at(s); return v * v; }, 0.0, t);
}

}  // namespace

void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& body) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        if (failed.load()) return;
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          failed = true;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

ExperimentReport run_theorem1(const ExperimentConfig& cfg, RunOptions options) {
  const fbm::Hurst hurst(cfg.hurst);
  if (!cfg.sigma.deterministic()) {
    throw AssumptionViolation("theorem1: sigma must be deterministic for the quadrature limit");
  }
  ExperimentReport rep = new_report(cfg, true);
  const young::SigmaSpec& sigma = cfg.sigma;
  // E[dX1 dX2] on a cell is sum_j sigma^{1,j} sigma^{2,j} n^{-2H}, so the limit pairs
  // the two coefficients of the same driver. The transposed pairing
  // sigma11 sigma12 + sigma21 sigma22 is recorded alongside for comparison.
  auto integrand = [&](double s) {
    return sigma(1, 1).at(s) * sigma(2, 1).at(s) + sigma(1, 2).at(s) * sigma(2, 2).at(s);
  };
  auto transposed = [&](double s) {
    return sigma(1, 1).at(s) * sigma(1, 2).at(s) + sigma(2, 1).at(s) * sigma(2, 2).at(s);
  };
  std::vector<double> limit;
  for (double t : cfg.t_grid) limit.push_back(integrate(integrand, 0.0, t));

  const Grid grid{cfg.n_grid, cfg.t_grid};
  const std::size_t fine = cfg.fine_intervals();
  std::vector<std::vector<double>> values(cfg.replications);
  parallel_for(cfg.replications, options.workers, [&](std::size_t r) {
    const auto model = young::simulate_model(sigma, hurst, fine, cfg.horizon,
                                             replicate_seed(cfg.seed, r), cfg.oversampling);
    std::vector<double> row(grid.size());
    for (std::size_t ni = 0; ni < grid.n.size(); ++ni) {
      const auto s = stats::cross_variation(model.x1, model.x2, grid.n[ni], grid.t,
                                            Normalization::power_2h_minus_1, hurst);
      for (std::size_t ti = 0; ti < grid.t.size(); ++ti) row[grid.index(ni, ti)] = s.values[ti];
    }
    values[r] = std::move(row);
  });

  const Tolerances& tol = cfg.tolerances;
  json limits = json::array();
  for (std::size_t ti = 0; ti < grid.t.size(); ++ti) {
    limits.push_back({{"t", grid.t[ti]},
                      {"limit", limit[ti]},
                      {"transposed_pairing", integrate(transposed, 0.0, grid.t[ti])}});
    std::vector<double> exceed;
    for (std::size_t ni = 0; ni < grid.n.size(); ++ni) {
      const auto x = column(values, grid.index(ni, ti));
      CellSummary cell;
      cell.statistic = "n^(2H-1)J_n";
      cell.normalization = std::string(stats::to_string(Normalization::power_2h_minus_1));
      cell.n = grid.n[ni];
      cell.t = grid.t[ti];
      cell.moments = stats::sample_moments(x);
      cell.reference = limit[ti];
      if (tol.epsilon) {
        std::size_t hits = 0;
        for (double v : x) hits += std::abs(v - limit[ti]) > *tol.epsilon ? 1 : 0;
        cell.exceedance = static_cast<double>(hits) / static_cast<double>(x.size());
        exceed.push_back(*cell.exceedance);
      }
      const std::string where = fmt_n(cell.n) + "," + fmt_t(cell.t);
      const double dev = std::abs(cell.moments.mean - limit[ti]);
      if (tol.mean_abs) {
        rep.criteria.push_back(make_criterion("mean_abs[" + where + "]", "|mean - limit|", dev,
                                              "<=", *tol.mean_abs));
      }
      if (tol.mean_se) {
        const double z = cell.moments.se_mean > 0.0 ? dev / cell.moments.se_mean
                                                    : (dev == 0.0 ? 0.0 : INFINITY);
        rep.criteria.push_back(make_criterion("mean_se[" + where + "]",
                                              "|mean - limit| in standard errors", z, "<=",
                                              *tol.mean_se));
      }
      rep.cells.push_back(cell);
    }
    if (tol.exceedance_monotone && exceed.size() > 1) {
      double rise = 0.0;
      for (std::size_t i = 1; i < exceed.size(); ++i) rise = std::max(rise, exceed[i] - exceed[i - 1]);
      rep.criteria.push_back(make_criterion(
          "exceedance_monotone[" + fmt_t(grid.t[ti]) + "]",
          "largest increase of P(|stat - limit| > eps) along the n grid", rise, "<=", 0.0));
    }
  }
  rep.findings["limit"] = limits;
  add_replicate_rows(rep, grid, values, "n^(2H-1)J_n",
                     std::string(stats::to_string(Normalization::power_2h_minus_1)));
  return rep;
}

ExperimentReport run_theorem2(const ExperimentConfig& cfg, RunOptions options) {
  const fbm::Hurst hurst(cfg.hurst);
  if (hurst.regime() == fbm::Regime::supercritical) return run_dyadic_cauchy(cfg, options);
  if (!cfg.sigma.diagonal()) {
    throw AssumptionViolation("theorem2: sigma^{1,2} and sigma^{2,1} must vanish");
  }
  ExperimentReport rep = new_report(cfg, true);
  const young::SigmaSpec& sigma = cfg.sigma;
  const Grid grid{cfg.n_grid, cfg.t_grid};
  const std::size_t fine = cfg.fine_intervals();
  const bool deterministic = sigma.deterministic();

  std::vector<double> q_fixed;
  if (deterministic) {
    for (double t : grid.t) {
      q_fixed.push_back(integrate(
          [&](double s) {
            const double v = sigma(1, 1).at(s) * sigma(2, 2).at(s);
            return v * v;
          },
          0.0, t));
    }
  }

  MixedNormalInput in;
  in.statistic = "a_nJ_n";
  in.normalization = std::string(stats::to_string(Normalization::a_n));
  in.grid = grid;
  in.values.resize(cfg.replications);
  in.q.resize(cfg.replications);
  parallel_for(cfg.replications, options.workers, [&](std::size_t r) {
    const auto model = young::simulate_model(sigma, hurst, fine, cfg.horizon,
                                             replicate_seed(cfg.seed, r), cfg.oversampling);
    std::vector<double> row(grid.size());
    for (std::size_t ni = 0; ni < grid.n.size(); ++ni) {
      const auto s = stats::cross_variation(model.x1, model.x2, grid.n[ni], grid.t,
                                            Normalization::a_n, hurst, cfg.log_base);
      for (std::size_t ti = 0; ti < grid.t.size(); ++ti) row[grid.index(ni, ti)] = s.values[ti];
    }
    in.values[r] = std::move(row);
    if (deterministic) {
      in.q[r] = q_fixed;
    } else {
      const auto s11 = sigma(1, 1).sample(model.b1, model.b2);
      const auto s22 = sigma(2, 2).sample(model.b1, model.b2);
      std::vector<double> sq(s11.size());
      for (std::size_t k = 0; k < sq.size(); ++k) sq[k] = s11[k] * s22[k] * s11[k] * s22[k];
      in.q[r] = riemann_q(sq, cfg.horizon, grid.t);
    }
  });

  // exact finite-n variance when sigma11 sigma22 is a constant c
  if (sigma(1, 1).is_constant() && sigma(2, 2).is_constant()) {
    const double c = sigma(1, 1).at(0.0) * sigma(2, 2).at(0.0);
    for (std::size_t n : grid.n) {
      const std::size_t cells = stats::floor_count(cfg.horizon, n);
      in.exact_variance.push_back(c * c *
                                  stats::xi_second_moment(hurst, n, 0, cells, cfg.horizon, cfg.log_base));
    }
  }
  mixed_normal_diagnostics(rep, cfg, in);
  add_replicate_rows(rep, grid, in.values, in.statistic, in.normalization);
  return rep;
}

ExperimentReport run_prop1(const ExperimentConfig& cfg, RunOptions options) {
  const fbm::Hurst hurst(cfg.hurst);
  if (!cfg.weight) throw IngestionError("prop1: weight is required");
  if (!(cfg.weight_holder_exponent > 0.5)) {
    throw AssumptionViolation("prop1: declared weight exponent must exceed 1/2");
  }
  if (hurst.regime() == fbm::Regime::supercritical) {
    throw UnsupportedRegime("prop1: H > 3/4 has a non-Gaussian limit");
  }
  ExperimentReport rep = new_report(cfg, false);
  const young::Coefficient& u = *cfg.weight;
  const Grid grid{cfg.n_grid, cfg.t_grid};
  const std::size_t fine = cfg.fine_intervals();

  std::vector<double> q_fixed;
  if (u.deterministic()) {
    for (double t : grid.t) q_fixed.push_back(c_match_quadrature(u, t));
  }

  MixedNormalInput in;
  in.statistic = "a_nK_n";
  in.normalization = std::string(stats::to_string(Normalization::a_n));
  in.grid = grid;
  in.values.resize(cfg.replications);
  in.q.resize(cfg.replications);
  in.conditioning.resize(cfg.replications);
  parallel_for(cfg.replications, options.workers, [&](std::size_t r) {
    const auto [b1, b2] =
        fbm::generate_bivariate_fbm(hurst, fine, cfg.horizon, replicate_seed(cfg.seed, r));
    const auto uv = u.sample(b1, b2);
    std::vector<double> row(grid.size());
    for (std::size_t ni = 0; ni < grid.n.size(); ++ni) {
      const double a = stats::rate_a_n(hurst, grid.n[ni], cfg.log_base);
      for (std::size_t ti = 0; ti < grid.t.size(); ++ti) {
        row[grid.index(ni, ti)] = a * stats::weighted_sum(uv, b1, b2, grid.n[ni], grid.t[ti]);
      }
    }
    in.values[r] = std::move(row);
    if (u.deterministic()) {
      in.q[r] = q_fixed;
    } else {
      std::vector<double> sq(uv.size());
      for (std::size_t k = 0; k < sq.size(); ++k) sq[k] = uv[k] * uv[k];
      in.q[r] = riemann_q(sq, cfg.horizon, grid.t);
    }
    in.conditioning[r] = b1[b1.intervals()];
  });
  if (u.is_constant()) {
    const double c = u.at(0.0);
    for (std::size_t n : grid.n) {
      const std::size_t cells = stats::floor_count(cfg.horizon, n);
      in.exact_variance.push_back(c * c *
                                  stats::xi_second_moment(hurst, n, 0, cells, cfg.horizon, cfg.log_base));
    }
  }
  mixed_normal_diagnostics(rep, cfg, in);
  add_replicate_rows(rep, grid, in.values, in.statistic, in.normalization);
  return rep;
}

ExperimentReport run_dyadic_cauchy(const ExperimentConfig& cfg, RunOptions options) {
  const fbm::Hurst hurst(cfg.hurst);
  if (hurst.regime() != fbm::Regime::supercritical) {
    throw UnsupportedRegime("dyadic_cauchy needs 3/4 < H < 1");
  }
  if (!cfg.sigma.diagonal()) {
    throw AssumptionViolation("dyadic_cauchy: sigma^{1,2} and sigma^{2,1} must vanish");
  }
  if (cfg.dyadic.levels == 0) throw IngestionError("dyadic_cauchy: dyadic.levels is required");
  ExperimentReport rep = new_report(cfg, true);
  const young::SigmaSpec& sigma = cfg.sigma;
  // statistic resolutions 2^min_level .. 2^levels
  Grid grid;
  for (std::size_t l = cfg.dyadic.min_level; l <= cfg.dyadic.levels; ++l) {
    grid.n.push_back(std::size_t{1} << l);
  }
  grid.t = cfg.t_grid;
  const std::size_t fine =
      static_cast<std::size_t>(std::llround(static_cast<double>(grid.n.back()) * cfg.horizon)) *
      cfg.oversampling;

  const std::array<std::string, 3> names{"taqqu", "rosenblatt_difference", "nJ_n"};
  std::array<std::vector<std::vector<double>>, 3> values;
  for (auto& v : values) v.resize(cfg.replications);
  parallel_for(cfg.replications, options.workers, [&](std::size_t r) {
    const auto model = young::simulate_model(sigma, hurst, fine, cfg.horizon,
                                             replicate_seed(cfg.seed, r), cfg.oversampling);
    const auto [beta1, beta2] = fbm::rotate(model.b1, model.b2);
    std::array<std::vector<double>, 3> rows;
    for (auto& row : rows) row.resize(grid.size());
    for (std::size_t ni = 0; ni < grid.n.size(); ++ni) {
      const std::size_t n = grid.n[ni];
      for (std::size_t ti = 0; ti < grid.t.size(); ++ti) {
        const std::size_t c = grid.index(ni, ti);
        const double t = grid.t[ti];
        rows[0][c] = stats::taqqu_stat(beta1, n, t, hurst);
        rows[1][c] = stats::rosenblatt_difference(beta1, beta2, n, t);
        rows[2][c] = static_cast<double>(n) * stats::cross_variation_at(model.x1, model.x2, n, t);
      }
    }
    for (std::size_t s = 0; s < 3; ++s) values[s][r] = std::move(rows[s]);
  });

  const Tolerances& tol = cfg.tolerances;
  const std::size_t M = cfg.replications;
  json cauchy = json::object();
  for (std::size_t s = 0; s < 3; ++s) {
    for (std::size_t ni = 0; ni < grid.n.size(); ++ni) {
      for (std::size_t ti = 0; ti < grid.t.size(); ++ti) {
        CellSummary cell;
        cell.statistic = names[s];
        cell.normalization = s == 0 ? "n^(1-2H)" : "n";
        cell.n = grid.n[ni];
        cell.t = grid.t[ti];
        cell.moments = stats::sample_moments(column(values[s], grid.index(ni, ti)));
        rep.cells.push_back(cell);
      }
    }
    json per_t = json::array();
    for (std::size_t ti = 0; ti < grid.t.size(); ++ti) {
      // d_l = || S_{2^{l+1}} - S_{2^l} ||_{L2}, with a delta-method standard error
      std::vector<double> d, se;
      json levels = json::array();
      for (std::size_t ni = 0; ni + 1 < grid.n.size(); ++ni) {
        std::vector<double> sq(M);
        for (std::size_t r = 0; r < M; ++r) {
          const double diff =
              values[s][r][grid.index(ni + 1, ti)] - values[s][r][grid.index(ni, ti)];
          sq[r] = diff * diff;
        }
        const auto m = stats::sample_moments(sq);
        const double dl = std::sqrt(m.mean);
        const double sel = dl > 0.0 ? m.se_mean / (2.0 * dl) : 0.0;
        d.push_back(dl);
        se.push_back(sel);
        levels.push_back({{"level", cfg.dyadic.min_level + ni}, {"d", dl}, {"se", sel}});
      }
      per_t.push_back({{"t", grid.t[ti]}, {"levels", levels}});
      if (tol.cauchy_margin_se && cfg.dyadic.check_levels.size() >= 2) {
        std::vector<std::size_t> check = cfg.dyadic.check_levels;
        std::sort(check.begin(), check.end());
        double worst = INFINITY;
        for (std::size_t i = 1; i < check.size(); ++i) {
          const std::size_t a = check[i - 1] - cfg.dyadic.min_level;
          const std::size_t b = check[i] - cfg.dyadic.min_level;
          const double margin = (d[a] - d[b]) / std::hypot(se[a], se[b]);
          worst = std::min(worst, margin);
        }
        std::string ids;
        for (std::size_t l : check) ids += (ids.empty() ? "" : ">") + std::to_string(l);
        rep.criteria.push_back(make_criterion(
            "cauchy_decrease[" + names[s] + "," + fmt_t(grid.t[ti]) + ",d_" + ids + "]",
            "smallest (d_a - d_b) / SE over consecutive check levels", worst, ">",
            *tol.cauchy_margin_se));
      }
    }
    cauchy[names[s]] = per_t;
  }
  rep.findings["cauchy"] = cauchy;

  json kurt = json::array();
  for (std::size_t ti = 0; ti < grid.t.size(); ++ti) {
    const auto m = stats::sample_moments(column(values[2], grid.index(grid.n.size() - 1, ti)));
    kurt.push_back({{"t", grid.t[ti]},
                    {"n", grid.n.back()},
                    {"excess_kurtosis", m.excess_kurtosis},
                    {"se", m.se_kurtosis}});
    if (tol.min_excess_kurtosis) {
      rep.criteria.push_back(make_criterion(
          "terminal_kurtosis[nJ_n," + fmt_n(grid.n.back()) + "," + fmt_t(grid.t[ti]) + "]",
          "excess kurtosis of the terminal n J_n", m.excess_kurtosis, ">",
          *tol.min_excess_kurtosis));
    }
  }
  rep.findings["terminal_kurtosis"] = kurt;
  add_replicate_rows(rep, grid, values[0], names[0], "n^(1-2H)");
  add_replicate_rows(rep, grid, values[1], names[1], "n");
  add_replicate_rows(rep, grid, values[2], names[2], "n");
  return rep;
}

ExperimentReport run_lemma2_check(const ExperimentConfig& cfg, RunOptions options) {
  const fbm::Hurst hurst(cfg.hurst);
  const young::Coefficient& g = cfg.lemma2.g;
  const young::Coefficient& h = cfg.lemma2.h;
  if (!g.deterministic()) throw AssumptionViolation("lemma2: g must be deterministic");
  ExperimentReport rep = new_report(cfg, false);
  const Grid grid{cfg.n_grid, cfg.t_grid};
  const Tolerances& tol = cfg.tolerances;

  double scale = 1.0;
  if (!h.deterministic()) {
    const auto& p = std::get<young::PathCoefficient>(h.rep());
    if (p.transform != young::PathTransform::identity) {
      throw AssumptionViolation("lemma2: only an identity path functional has a known limit");
    }
    scale = p.scale * p.scale;
  }
  const double gamma = cfg.lemma2.gamma.value_or(h.deterministic() ? 1.0 : 2.0 * cfg.hurst - 1.0);
  rep.findings["gamma"] = gamma;
  std::vector<double> limit;
  for (double t : grid.t) limit.push_back(scale * integrate([&](double s) { return g.at(s); }, 0.0, t));

  auto weighted = [&](std::span<const double> hv, std::size_t stride, std::size_t n, double t) {
    const std::size_t count = stats::floor_count(t, n);
    stats::CompensatedSum s;
    for (std::size_t k = 1; k <= count; ++k) {
      const double dh = hv[k * stride] - hv[(k - 1) * stride];
      s.add(g.at(static_cast<double>(k) / static_cast<double>(n)) * dh * dh);
    }
    return std::pow(static_cast<double>(n), gamma) * s.value();
  };

  json table = json::array();
  if (h.deterministic()) {
    for (std::size_t ni = 0; ni < grid.n.size(); ++ni) {
      const std::size_t n = grid.n[ni];
      const std::size_t cells = stats::floor_count(cfg.horizon, n);
      std::vector<double> hv(cells + 1);
      for (std::size_t k = 0; k <= cells; ++k) hv[k] = h.at(static_cast<double>(k) / static_cast<double>(n));
      for (std::size_t ti = 0; ti < grid.t.size(); ++ti) {
        const double v = weighted(hv, 1, n, grid.t[ti]);
        CellSummary cell;
        cell.statistic = "weighted_quadratic_sum";
        cell.normalization = "n^gamma";
        cell.n = n;
        cell.t = grid.t[ti];
        cell.moments.count = 1;
        cell.moments.mean = v;
        cell.reference = limit[ti];
        rep.cells.push_back(cell);
        const double err = std::abs(v - limit[ti]);
        table.push_back({{"n", n}, {"t", grid.t[ti]}, {"value", v}, {"limit", limit[ti]}, {"abs_error", err}});
        if (tol.abs_error && ni + 1 == grid.n.size()) {
          rep.criteria.push_back(make_criterion("abs_error[" + fmt_n(n) + "," + fmt_t(grid.t[ti]) + "]",
                                                "|value - integral of g|", err, "<=", *tol.abs_error));
        }
        rep.replicates.push_back({0, n, grid.t[ti], cell.statistic, cell.normalization, v});
      }
    }
    rep.findings["table"] = table;
    return rep;
  }

  const std::size_t fine = cfg.fine_intervals();
  std::vector<std::vector<double>> values(cfg.replications);
  parallel_for(cfg.replications, options.workers, [&](std::size_t r) {
    const auto [b1, b2] =
        fbm::generate_bivariate_fbm(hurst, fine, cfg.horizon, replicate_seed(cfg.seed, r));
    const auto hv = h.sample(b1, b2);
    std::vector<double> row(grid.size());
    for (std::size_t ni = 0; ni < grid.n.size(); ++ni) {
      const std::size_t stride = stats::resolution_stride(b1, grid.n[ni]);
      for (std::size_t ti = 0; ti < grid.t.size(); ++ti) {
        row[grid.index(ni, ti)] = weighted(hv, stride, grid.n[ni], grid.t[ti]);
      }
    }
    values[r] = std::move(row);
  });
  for (std::size_t ni = 0; ni < grid.n.size(); ++ni) {
    for (std::size_t ti = 0; ti < grid.t.size(); ++ti) {
      CellSummary cell;
      cell.statistic = "weighted_quadratic_sum";
      cell.normalization = "n^gamma";
      cell.n = grid.n[ni];
      cell.t = grid.t[ti];
      cell.moments = stats::sample_moments(column(values, grid.index(ni, ti)));
      cell.reference = limit[ti];
      const std::string where = fmt_n(cell.n) + "," + fmt_t(cell.t);
      const double dev = std::abs(cell.moments.mean - limit[ti]);
      if (tol.mean_se) {
        rep.criteria.push_back(make_criterion("mean_se[" + where + "]",
                                              "|mean - integral of g| in standard errors",
                                              dev / cell.moments.se_mean, "<=", *tol.mean_se));
      }
      if (tol.abs_error && ni + 1 == grid.n.size()) {
        rep.criteria.push_back(make_criterion("abs_error[" + where + "]", "|mean - integral of g|",
                                              dev, "<=", *tol.abs_error));
      }
      rep.cells.push_back(cell);
    }
  }
  add_replicate_rows(rep, grid, values, "weighted_quadratic_sum", "n^gamma");
  return rep;
}

ExperimentReport run_lemma1_rates(const ExperimentConfig& cfg, RunOptions options) {
  const fbm::Hurst hurst(cfg.hurst);
  ExperimentReport rep = new_report(cfg, true);
  const std::size_t levels = cfg.n_grid.size();
  std::vector<young::Lemma1Estimate> est(levels);
  parallel_for(levels, options.workers, [&](std::size_t i) {
    const std::size_t n = cfg.n_grid[i];
    std::size_t cell = n;
    if (cfg.lemma1.cell == CellChoice::first) cell = 1;
    if (cfg.lemma1.cell == CellChoice::middle) cell = std::max<std::size_t>(1, n / 2);
    est[i] = young::lemma1_error(cfg.sigma, hurst, n, cell, cfg.replications,
                                 mix_seed(mix_seed(cfg.seed, kLevelStream), n), cfg.oversampling,
                                 cfg.lemma1.entry);
  });

  std::vector<double> logn, loge1, loge2;
  json rows = json::array();
  for (const auto& e : est) {
    logn.push_back(std::log(static_cast<double>(e.n)));
    loge1.push_back(std::log(e.e1));
    loge2.push_back(std::log(e.e2));
    for (int which = 1; which <= 2; ++which) {
      CellSummary cell;
      cell.statistic = which == 1 ? "e1_centered" : "e2_full";
      cell.normalization = "none";
      cell.n = e.n;
      cell.t = static_cast<double>(e.cell) / static_cast<double>(e.n);
      cell.moments.count = cfg.replications;
      cell.moments.mean = which == 1 ? e.e1 : e.e2;
      cell.moments.se_mean = which == 1 ? e.e1_se : e.e2_se;
      rep.cells.push_back(cell);
      rep.replicates.push_back({0, e.n, cell.t, cell.statistic, "none", cell.moments.mean});
    }
    rows.push_back({{"n", e.n}, {"cell", e.cell}, {"e1", e.e1}, {"e1_se", e.e1_se},
                    {"e2", e.e2}, {"e2_se", e.e2_se}});
  }
  rep.findings["levels"] = rows;
  const auto fit1 = stats::linear_fit(logn, loge1);
  const auto fit2 = stats::linear_fit(logn, loge2);
  auto fit_json = [](const stats::LinearFit& f) {
    return json{{"slope", f.slope},
                {"slope_se", f.slope_se},
                {"band95", {f.slope - 1.96 * f.slope_se, f.slope + 1.96 * f.slope_se}},
                {"r_squared", f.r_squared}};
  };
  rep.findings["slope_e1"] = fit_json(fit1);
  rep.findings["slope_e2"] = fit_json(fit2);
  const double alpha = cfg.sigma.holder_exponent;
  rep.findings["expected_e2_slope"] = -cfg.hurst;
  rep.findings["e1_slope_bound"] = -2.0 * alpha;
  if (cfg.tolerances.slope_e2) {
    rep.criteria.push_back(make_criterion("slope_e2", "|slope of log e2 vs log n + H|",
                                          std::abs(fit2.slope + cfg.hurst), "<=",
                                          *cfg.tolerances.slope_e2));
  }
  if (cfg.tolerances.slope_e1_slack) {
    rep.criteria.push_back(make_criterion("slope_e1", "slope of log e1 vs log n", fit1.slope, "<=",
                                          -2.0 * alpha + *cfg.tolerances.slope_e1_slack));
  }
  return rep;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, RunOptions options) {
  switch (cfg.experiment) {
    case ExperimentId::theorem1: return run_theorem1(cfg, options);
    case ExperimentId::theorem2: return run_theorem2(cfg, options);
    case ExperimentId::dyadic_cauchy: return run_dyadic_cauchy(cfg, options);
    case ExperimentId::prop1: return run_prop1(cfg, options);
    case ExperimentId::lemma2: return run_lemma2_check(cfg, options);
    case ExperimentId::lemma1_rates: return run_lemma1_rates(cfg, options);
  }
  throw std::logic_error("unreachable experiment id");
}

}  // namespace crossvar::lab
