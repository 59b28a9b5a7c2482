#include "crossvar/fbm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "circulant.hpp"
#include "crossvar/errors.hpp"
#include "crossvar/seeding.hpp"

namespace crossvar::fbm {

std::string_view to_string(Regime regime) noexcept {
  switch (regime) {
    case Regime::subcritical: return "subcritical";
    case Regime::critical: return "critical";
    case Regime::supercritical: return "supercritical";
  }
  return "unknown";
}

Hurst::Hurst(double h) : h_(h) {
  if (!(h > 0.0 && h < 1.0)) {
    throw AssumptionViolation("Hurst index must lie in (0,1), got " + std::to_string(h));
  }
}

Regime Hurst::regime() const noexcept {
  if (h_ < 0.75) return Regime::subcritical;
  if (h_ == 0.75) return Regime::critical;
  return Regime::supercritical;
}

void Hurst::require_long_memory() const {
  if (!(h_ > 0.5)) {
    throw AssumptionViolation("model requires H > 1/2, got " + std::to_string(h_));
  }
}

SamplePath::SamplePath(double horizon, std::vector<double> values, PathMeta meta)
    : horizon_(horizon), values_(std::move(values)), meta_(std::move(meta)) {
  if (!(horizon > 0.0)) throw std::invalid_argument("path horizon must be positive");
  if (values_.size() < 2) throw std::invalid_argument("path needs at least one interval");
}

void require_same_grid(const SamplePath& a, const SamplePath& b, std::string_view what) {
  if (!a.same_grid(b)) {
    throw GridMismatch(std::string(what) + ": paths are on different grids (N=" +
                       std::to_string(a.intervals()) + " vs " + std::to_string(b.intervals()) +
                       ")");
  }
}

double fgn_autocovariance(Hurst hurst, long long lag) noexcept {
  const double two_h = 2.0 * hurst.value();
  const double r = std::abs(static_cast<double>(lag));
  return 0.5 * (std::pow(r + 1.0, two_h) + std::pow(std::abs(r - 1.0), two_h) -
                2.0 * std::pow(r, two_h));
}

double fbm_covariance(Hurst hurst, double s, double t) {
  if (s < 0.0 || t < 0.0) throw std::invalid_argument("fbm_covariance: times must be >= 0");
  const double two_h = 2.0 * hurst.value();
  return 0.5 * (std::pow(s, two_h) + std::pow(t, two_h) - std::pow(std::abs(t - s), two_h));
}

SamplePath generate_fbm_path(Hurst hurst, std::size_t intervals, double horizon,
                             std::uint64_t seed, int component, GeneratorOptions options) {
  if (intervals < 2) throw std::invalid_argument("fBm path needs N >= 2");
  if (!(horizon > 0.0)) throw std::invalid_argument("fBm horizon must be positive");

  std::mt19937_64 engine(component_seed(seed, static_cast<std::uint64_t>(component)));
  std::vector<double> noise(intervals);
  PathMeta meta{hurst.value(), seed, "circulant-embedding/mt19937_64", component, false};

  auto use_dense = [&] {
    detail::sample_dense(*detail::dense_factor(hurst.value(), intervals), engine, noise);
    meta.generator = "dense-cholesky/mt19937_64";
  };

  switch (options.method) {
    case SamplerMethod::dense:
      use_dense();
      break;
    case SamplerMethod::circulant:
    case SamplerMethod::automatic: {
      auto embedding = detail::circulant_embedding(hurst.value(), intervals);
      if (embedding->nonnegative) {
        detail::sample_circulant(*embedding, engine, noise);
      } else if (options.method == SamplerMethod::circulant) {
        throw std::runtime_error("circulant embedding has a negative eigenvalue " +
                                 std::to_string(embedding->min_eigenvalue));
      } else {
        use_dense();
        meta.fallback = true;
      }
      break;
    }
  }

  const double scale = std::pow(horizon / static_cast<double>(intervals), hurst.value());
  std::vector<double> values(intervals + 1);
  values[0] = 0.0;
  for (std::size_t k = 0; k < intervals; ++k) values[k + 1] = values[k] + scale * noise[k];
  return SamplePath(horizon, std::move(values), std::move(meta));
}

std::pair<SamplePath, SamplePath> generate_bivariate_fbm(Hurst hurst, std::size_t intervals,
                                                         double horizon, std::uint64_t seed,
                                                         std::pair<int, int> components,
                                                         GeneratorOptions options) {
  return {generate_fbm_path(hurst, intervals, horizon, seed, components.first, options),
          generate_fbm_path(hurst, intervals, horizon, seed, components.second, options)};
}

namespace {

std::pair<SamplePath, SamplePath> orthogonal_pair(const SamplePath& a, const SamplePath& b,
                                                  const char* generator) {
  require_same_grid(a, b, "rotate");
  constexpr double c = 1.0 / std::numbers::sqrt2;
  const std::size_t size = a.intervals() + 1;
  std::vector<double> plus(size), minus(size);
  for (std::size_t k = 0; k < size; ++k) {
    plus[k] = (a[k] + b[k]) * c;
    minus[k] = (a[k] - b[k]) * c;
  }
  PathMeta m1 = a.meta();
  PathMeta m2 = b.meta();
  m1.generator = m2.generator = generator;
  return {SamplePath(a.horizon(), std::move(plus), m1),
          SamplePath(a.horizon(), std::move(minus), m2)};
}

}  // namespace

std::pair<SamplePath, SamplePath> rotate(const SamplePath& b1, const SamplePath& b2) {
  return orthogonal_pair(b1, b2, "rotation");
}

std::pair<SamplePath, SamplePath> unrotate(const SamplePath& beta1, const SamplePath& beta2) {
  return orthogonal_pair(beta1, beta2, "inverse-rotation");
}

double holder_norm(const SamplePath& path, double alpha) {
  return holder_norm(path, alpha, 0, path.intervals());
}

double holder_norm(const SamplePath& path, double alpha, std::size_t first, std::size_t last) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("holder_norm: alpha in (0,1]");
  if (first >= last || last > path.intervals()) {
    throw std::invalid_argument("holder_norm: invalid window");
  }
  const std::size_t len = last - first;
  const auto v = path.values();
  const double h = path.step();
  double best = 0.0;

  if (path.intervals() <= kHolderExactLimit) {
    std::vector<double> weight(len + 1);
    for (std::size_t g = 1; g <= len; ++g) weight[g] = std::pow(static_cast<double>(g) * h, -alpha);
    for (std::size_t s = first; s < last; ++s) {
      for (std::size_t t = s + 1; t <= last; ++t) {
        best = std::max(best, std::abs(v[t] - v[s]) * weight[t - s]);
      }
    }
    return best;
  }

  for (std::size_t g = 1; g <= len; g *= 2) {
    const double w = std::pow(static_cast<double>(g) * h, -alpha);
    for (std::size_t s = first; s + g <= last; ++s) {
      best = std::max(best, std::abs(v[s + g] - v[s]) * w);
    }
  }
  return best;
}

namespace {

double power(double x, double q, int iq) {
  if (iq > 0) {
    double r = x;
    for (int i = 1; i < iq; ++i) r *= x;
    return r;
  }
  return std::pow(x, q);
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& x) {
  double m = 0.0;
  for (double v : x) m += v;
  m /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  const double n = static_cast<double>(x.size());
  return {m, n > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0};
}

}  // namespace

GrrReport grr_moment_check(Hurst hurst, double alpha, double q, std::size_t replications,
                           std::span<const std::size_t> grid_sizes, std::uint64_t seed) {
  if (!(q > 1.0)) throw std::invalid_argument("grr_moment_check: q must exceed 1");
  if (replications < 2) throw std::invalid_argument("grr_moment_check: need >= 2 replications");
  if (grid_sizes.empty()) throw std::invalid_argument("grr_moment_check: empty grid");

  GrrReport report;
  report.hurst = hurst.value();
  report.alpha = alpha;
  report.q = q;
  report.replications = replications;
  report.alpha_in_range = alpha < hurst.value();
  report.rhs_integrable = q * (hurst.value() - alpha) > 1.0;

  const int iq = (q == std::floor(q) && q <= 16.0) ? static_cast<int>(q) : 0;
  const double exponent = 2.0 + q * alpha;

  for (std::size_t n : grid_sizes) {
    const double h = 1.0 / static_cast<double>(n);
    std::vector<double> weight(n + 1);
    for (std::size_t g = 1; g <= n; ++g) {
      weight[g] = 2.0 * h * h * std::pow(static_cast<double>(g) * h, -exponent);
    }
    std::vector<double> lhs(replications), rhs(replications);
    for (std::size_t r = 0; r < replications; ++r) {
      const SamplePath b = generate_fbm_path(hurst, n, 1.0, replicate_seed(seed, r));
      lhs[r] = power(holder_norm(b, alpha), q, iq);
      const auto v = b.values();
      double s = 0.0;
      for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t w = u + 1; w <= n; ++w) s += power(std::abs(v[w] - v[u]), q, iq) * weight[w - u];
      }
      rhs[r] = s;
    }
    const MeanSe l = mean_se(lhs);
    const MeanSe rr = mean_se(rhs);
    GrrLevel level{n, l.mean, l.se, rr.mean, rr.se, rr.mean > 0.0 ? l.mean / rr.mean : 0.0};
    report.levels.push_back(level);
  }

  double lo = report.levels.front().lhs_moment;
  double hi = lo;
  for (const auto& level : report.levels) {
    report.max_ratio = std::max(report.max_ratio, level.ratio);
    lo = std::min(lo, level.lhs_moment);
    hi = std::max(hi, level.lhs_moment);
  }
  report.lhs_spread = lo > 0.0 ? hi / lo - 1.0 : 0.0;
  return report;
}

}  // namespace crossvar::fbm
