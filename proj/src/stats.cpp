#include "crossvar/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "crossvar/errors.hpp"
#include "crossvar/moments.hpp"

namespace crossvar::stats {
namespace {

double log_in_base(double x, LogBase base) {
  switch (base) {
    case LogBase::natural: return std::log(x);
    case LogBase::two: return std::log2(x);
    case LogBase::ten: return std::log10(x);
  }
  return std::log(x);
}

struct Lattice {
  std::size_t stride = 0;
  std::size_t cells = 0;  // floor(nT)
};

Lattice lattice(const fbm::SamplePath& path, std::size_t n) {
  return {resolution_stride(path, n), path.intervals() / resolution_stride(path, n)};
}

std::size_t checked_count(double t, std::size_t n, const Lattice& lat) {
  if (t < 0.0) throw std::invalid_argument("statistic time must be >= 0");
  const std::size_t count = floor_count(t, n);
  if (count > lat.cells) {
    throw std::invalid_argument("statistic time " + std::to_string(t) + " exceeds the path horizon");
  }
  return count;
}

// sum_{k=1}^{count} [u_{k s}] (a_{ks} - a_{(k-1)s}) (b_{ks} - b_{(k-1)s})
double product_sum(const double* u, std::span<const double> a, std::span<const double> b,
                   std::size_t stride, std::size_t count) {
  double s = 0.0;
  for (std::size_t k = 1; k <= count; ++k) {
    const std::size_t hi = k * stride;
    const std::size_t lo = hi - stride;
    const double da = a[hi] - a[lo];
    const double db = b[hi] - b[lo];
    s += u ? (u[hi] * da) * db : da * db;
  }
  return s;
}

}  // namespace

std::string_view to_string(LogBase base) noexcept {
  switch (base) {
    case LogBase::natural: return "natural";
    case LogBase::two: return "2";
    case LogBase::ten: return "10";
  }
  return "natural";
}

LogBase log_base_from_string(std::string_view name) {
  if (name == "natural" || name == "e") return LogBase::natural;
  if (name == "2") return LogBase::two;
  if (name == "10") return LogBase::ten;
  throw std::invalid_argument("log base must be natural, 2 or 10");
}

std::string_view to_string(Normalization norm) noexcept {
  switch (norm) {
    case Normalization::none: return "none";
    case Normalization::power_2h_minus_1: return "n^(2H-1)";
    case Normalization::a_n: return "a_n";
  }
  return "none";
}

double rate_a_n(fbm::Hurst hurst, std::size_t n, LogBase base) {
  const double h = hurst.value();
  if (!(h > 0.5)) throw UnsupportedRegime("a_n is defined for 1/2 < H < 1");
  if (n < 2) throw std::invalid_argument("a_n needs n >= 2");
  const double dn = static_cast<double>(n);
  switch (hurst.regime()) {
    case fbm::Regime::subcritical: return std::pow(dn, 2.0 * h - 0.5);
    case fbm::Regime::critical: return dn / std::sqrt(log_in_base(dn, base));
    case fbm::Regime::supercritical: return dn;
  }
  return dn;
}

std::size_t floor_count(double t, std::size_t n) {
  const double dn = static_cast<double>(n);
  const double v = std::floor(dn * t + 1e-9 * dn);
  return v <= 0.0 ? 0 : static_cast<std::size_t>(v);
}

std::size_t floor_count(std::size_t numerator, std::size_t denominator, std::size_t n) {
  if (denominator == 0) throw std::invalid_argument("floor_count: zero denominator");
  return (numerator * n) / denominator;
}

std::size_t resolution_stride(const fbm::SamplePath& path, std::size_t n) {
  if (n == 0) throw std::invalid_argument("resolution must be positive");
  const double fine = static_cast<double>(path.intervals());
  const double ratio = fine / (static_cast<double>(n) * path.horizon());
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(rounded - ratio) > 1e-9 * std::max(1.0, ratio)) {
    throw GridMismatch("path with N=" + std::to_string(path.intervals()) + " on [0," +
                       std::to_string(path.horizon()) + "] does not refine resolution n=" +
                       std::to_string(n));
  }
  return static_cast<std::size_t>(rounded);
}

CrossVariationSeries cross_variation(const fbm::SamplePath& x1, const fbm::SamplePath& x2,
                                     std::size_t n, std::span<const double> tgrid,
                                     Normalization normalization,
                                     std::optional<fbm::Hurst> hurst, LogBase base) {
  fbm::require_same_grid(x1, x2, "cross_variation");
  const Lattice lat = lattice(x1, n);
  CrossVariationSeries series;
  series.n = n;
  series.tgrid.assign(tgrid.begin(), tgrid.end());
  series.normalization = normalization;
  if (normalization != Normalization::none) {
    if (!hurst) throw std::invalid_argument("cross_variation: normalization needs H");
    series.factor = normalization == Normalization::a_n
                        ? rate_a_n(*hurst, n, base)
                        : std::pow(static_cast<double>(n), 2.0 * hurst->value() - 1.0);
  }
  for (double t : tgrid) {
    const std::size_t count = checked_count(t, n, lat);
    series.values.push_back(series.factor *
                            product_sum(nullptr, x1.values(), x2.values(), lat.stride, count));
  }
  return series;
}

double cross_variation_at(const fbm::SamplePath& x1, const fbm::SamplePath& x2, std::size_t n,
                          double t) {
  fbm::require_same_grid(x1, x2, "cross_variation");
  const Lattice lat = lattice(x1, n);
  return product_sum(nullptr, x1.values(), x2.values(), lat.stride, checked_count(t, n, lat));
}

double quadratic_variation(const fbm::SamplePath& x, std::size_t n, double t) {
  const Lattice lat = lattice(x, n);
  return product_sum(nullptr, x.values(), x.values(), lat.stride, checked_count(t, n, lat));
}

double taqqu_stat(const fbm::SamplePath& beta, std::size_t n, double t, fbm::Hurst hurst) {
  const Lattice lat = lattice(beta, n);
  const std::size_t count = checked_count(t, n, lat);
  const double dn = static_cast<double>(n);
  const double scale = std::pow(dn, 2.0 * hurst.value());
  const auto v = beta.values();
  double s = 0.0;
  for (std::size_t k = 1; k <= count; ++k) {
    const double d = v[k * lat.stride] - v[(k - 1) * lat.stride];
    s += scale * d * d - 1.0;
  }
  return std::pow(dn, 1.0 - 2.0 * hurst.value()) * s;
}

double rosenblatt_difference(const fbm::SamplePath& beta1, const fbm::SamplePath& beta2,
                             std::size_t n, double t) {
  fbm::require_same_grid(beta1, beta2, "rosenblatt_difference");
  const Lattice lat = lattice(beta1, n);
  const std::size_t count = checked_count(t, n, lat);
  const auto a = beta1.values();
  const auto b = beta2.values();
  double s = 0.0;
  for (std::size_t k = 1; k <= count; ++k) {
    const std::size_t hi = k * lat.stride;
    const std::size_t lo = hi - lat.stride;
    const double da = a[hi] - a[lo];
    const double db = b[hi] - b[lo];
    s += da * da - db * db;
  }
  return static_cast<double>(n) * s;
}

double weighted_sum(const fbm::SamplePath& u, const fbm::SamplePath& b1,
                    const fbm::SamplePath& b2, std::size_t n, double t) {
  fbm::require_same_grid(u, b1, "weighted_sum");
  return weighted_sum(u.values(), b1, b2, n, t);
}

double weighted_sum(std::span<const double> u, const fbm::SamplePath& b1,
                    const fbm::SamplePath& b2, std::size_t n, double t) {
  fbm::require_same_grid(b1, b2, "weighted_sum");
  if (u.size() != b1.intervals() + 1) throw GridMismatch("weighted_sum: weight has wrong length");
  const Lattice lat = lattice(b1, n);
  return product_sum(u.data(), b1.values(), b2.values(), lat.stride, checked_count(t, n, lat));
}

double xi_second_moment(fbm::Hurst hurst, std::size_t n, std::size_t i, std::size_t j,
                        double horizon, LogBase base) {
  const std::size_t cells = floor_count(horizon, n);
  if (i > j || j > cells) {
    throw std::invalid_argument("xi_second_moment: need 0 <= i <= j <= floor(nT)");
  }
  if (i == j) return 0.0;
  const std::size_t len = j - i;
  CompensatedSum s;
  s.add(static_cast<double>(len));  // rho(0) = 1
  for (std::size_t r = 1; r < len; ++r) {
    const double rho = fbm::fgn_autocovariance(hurst, static_cast<long long>(r));
    s.add(2.0 * static_cast<double>(len - r) * rho * rho);
  }
  const double a = rate_a_n(hurst, n, base);
  return a * a * std::pow(static_cast<double>(n), -4.0 * hurst.value()) * s.value();
}

H2Report h2_bound_check(fbm::Hurst hurst, std::span<const std::size_t> n_grid, double horizon,
                        LogBase base) {
  if (n_grid.empty()) throw std::invalid_argument("h2_bound_check: empty n grid");
  H2Report report;
  report.hurst = hurst.value();
  for (std::size_t n : n_grid) {
    const std::size_t cells = floor_count(horizon, n);
    CompensatedSum rho_sq;
    rho_sq.add(1.0);
    for (std::size_t r = 1; r <= cells; ++r) {
      const double rho = fbm::fgn_autocovariance(hurst, static_cast<long long>(r));
      rho_sq.add(2.0 * rho * rho);
    }
    const double a = rate_a_n(hurst, n, base);
    const double dn = static_cast<double>(n);
    H2Level level;
    level.n = n;
    level.constant = a * a * std::pow(dn, 1.0 - 4.0 * hurst.value()) * rho_sq.value();

    const std::size_t starts[] = {0, cells / 3};
    for (std::size_t i : starts) {
      for (std::size_t len = 1; i + len <= cells; len *= 2) {
        const double moment = xi_second_moment(hurst, n, i, i + len, horizon, base);
        const double bound = level.constant * static_cast<double>(len) / dn;
        const double ratio = moment / bound;
        level.max_ratio = std::max(level.max_ratio, ratio);
        if (len == 1) level.unit_ratio = ratio;
        ++level.pairs_checked;
      }
    }
    report.bound_holds = report.bound_holds && level.max_ratio <= 1.0 + 1e-12;
    report.levels.push_back(level);
  }
  report.sup_constant = report.levels.front().constant;
  report.min_constant = report.sup_constant;
  for (const auto& l : report.levels) {
    report.sup_constant = std::max(report.sup_constant, l.constant);
    report.min_constant = std::min(report.min_constant, l.constant);
  }
  report.spread = report.sup_constant / report.min_constant - 1.0;
  return report;
}

HurstEstimate estimate_hurst(const fbm::SamplePath& x, std::size_t scales) {
  if (scales < 3) throw std::invalid_argument("estimate_hurst: need at least 3 scales");
  const std::size_t max_lag = std::size_t{1} << (scales - 1);
  if (x.intervals() / max_lag < 2) throw std::invalid_argument("estimate_hurst: path too short");
  HurstEstimate est;
  std::vector<double> log_step;
  const auto v = x.values();
  for (std::size_t lag = 1; lag <= max_lag; lag *= 2) {
    const std::size_t count = x.intervals() / lag;
    double qv = 0.0;
    for (std::size_t k = 1; k <= count; ++k) {
      const double d = v[k * lag] - v[(k - 1) * lag];
      qv += d * d;
    }
    if (!(qv > 0.0)) throw std::invalid_argument("estimate_hurst: degenerate (constant) path");
    est.lags.push_back(lag);
    est.log_variation.push_back(std::log(qv));
    log_step.push_back(std::log(static_cast<double>(lag) * x.step()));
  }
  const LinearFit fit = linear_fit(log_step, est.log_variation);
  est.value = 0.5 * (fit.slope + 1.0);
  est.se = 0.5 * fit.slope_se;
  est.boundary = est.value >= 1.0 - 1e-3 || est.value <= 1e-3;
  return est;
}

}  // namespace crossvar::stats
