#include "crossvar/h0test.hpp"

#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <numbers>

#include "crossvar/constants.hpp"
#include "crossvar/errors.hpp"
#include "crossvar/moments.hpp"

namespace crossvar::h0 {

std::size_t default_block_count(std::size_t n) {
  if (n == 0) throw std::invalid_argument("default_block_count: n must be positive");
  std::size_t root = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
  while (root * root > n) --root;
  while ((root + 1) * (root + 1) <= n) ++root;
  for (std::size_t l = root; l >= 1; --l) {
    if (n % l == 0) return l;
  }
  return 1;
}

VarianceEstimate estimate_conditional_variance(const fbm::SamplePath& x1, const fbm::SamplePath& x2,
                                               std::size_t n, fbm::Hurst hurst,
                                               std::optional<std::size_t> blocks) {
  fbm::require_same_grid(x1, x2, "estimate_conditional_variance");
  hurst.require_long_memory();
  if (x1.horizon() < 1.0 - 1e-12) {
    throw GridMismatch("estimate_conditional_variance: paths must cover [0, 1]");
  }
  const std::size_t stride = stats::resolution_stride(x1, n);
  const std::size_t L = blocks ? *blocks : default_block_count(n);
  if (L == 0 || n % L != 0) {
    throw GridMismatch("block count " + std::to_string(L) + " does not divide n=" + std::to_string(n));
  }
  const std::size_t per_block = n / L;
  const double norm = static_cast<double>(L) * std::pow(static_cast<double>(n), 2.0 * hurst.value() - 1.0);

  VarianceEstimate est;
  est.blocks = L;
  est.v1.resize(L);
  est.v2.resize(L);
  stats::CompensatedSum total;
  for (std::size_t l = 0; l < L; ++l) {
    stats::CompensatedSum q1, q2;
    for (std::size_t k = l * per_block; k < (l + 1) * per_block; ++k) {
      const double d1 = x1[(k + 1) * stride] - x1[k * stride];
      const double d2 = x2[(k + 1) * stride] - x2[k * stride];
      q1.add(d1 * d1);
      q2.add(d2 * d2);
    }
    est.v1[l] = norm * q1.value();
    est.v2[l] = norm * q2.value();
    if (est.v1[l] == 0.0 || est.v2[l] == 0.0) ++est.zero_blocks;
    total.add(est.v1[l] * est.v2[l]);
  }
  est.value = total.value() / static_cast<double>(L);
  est.degenerate = !(est.value > 0.0) || !std::isfinite(est.value);
  return est;
}

std::string_view to_string(ScaleChoice s) noexcept {
  switch (s) {
    case ScaleChoice::exact_finite_n: return "exact_finite_n";
    case ScaleChoice::square_root: return "square_root";
    case ScaleChoice::unrooted: return "unrooted";
  }
  return "exact_finite_n";
}

ScaleChoice scale_choice_from_string(std::string_view name) {
  for (ScaleChoice s : {ScaleChoice::exact_finite_n, ScaleChoice::square_root, ScaleChoice::unrooted}) {
    if (to_string(s) == name) return s;
  }
  throw std::invalid_argument("unknown scale '" + std::string(name) + "'");
}

std::string_view to_string(Decision d) noexcept {
  switch (d) {
    case Decision::accept: return "accept";
    case Decision::reject: return "reject";
    case Decision::abstain: return "abstain";
  }
  return "abstain";
}

double reference_scale(fbm::Hurst hurst, std::size_t n, ScaleChoice choice, stats::LogBase base) {
  if (choice == ScaleChoice::exact_finite_n) {
    return std::sqrt(stats::xi_second_moment(hurst, n, 0, n, 1.0, base));
  }
  const auto c = stats::c_constant(hurst, choice == ScaleChoice::unrooted
                                              ? stats::ConstantVariant::unrooted
                                              : stats::ConstantVariant::square_root);
  double factor = 1.0;
  if (hurst.regime() == fbm::Regime::critical) {
    if (base == stats::LogBase::two) factor = std::sqrt(std::numbers::ln2);
    if (base == stats::LogBase::ten) factor = std::sqrt(std::numbers::ln10);
  }
  return c.value / 2.0 * factor;
}

TestResult test_zero_cross(const fbm::SamplePath& x1, const fbm::SamplePath& x2, std::size_t n,
                           fbm::Hurst hurst, const TestOptions& options) {
  if (!(options.level > 0.0 && options.level < 1.0)) {
    throw std::invalid_argument("test level must lie in (0, 1)");
  }
  TestResult res;
  res.n = n;
  res.level = options.level;
  res.scale_choice = options.scale;

  double h = hurst.value();
  if (options.estimate_hurst) {
    const auto e1 = stats::estimate_hurst(x1);
    const auto e2 = stats::estimate_hurst(x2);
    stats::HurstEstimate e = e1;
    e.value = 0.5 * (e1.value + e2.value);
    e.se = 0.5 * std::hypot(e1.se, e2.se);
    e.boundary = e1.boundary || e2.boundary;
    res.hurst_estimate = e;
    h = e.value;
    res.warnings.push_back("plug-in Hurst estimate used; its estimation error is not corrected");
  }
  if (!(h > 0.5 && h < 1.0)) {
    throw UnsupportedRegime("test needs 1/2 < H <= 3/4, got H=" + std::to_string(h));
  }
  const fbm::Hurst used(h);
  if (used.regime() == fbm::Regime::supercritical) {
    throw UnsupportedRegime("H=" + std::to_string(h) +
                            " > 3/4: the null limit is a non-Gaussian Rosenblatt difference");
  }
  res.hurst = h;
  res.regime = used.regime();

  res.variance = estimate_conditional_variance(x1, x2, n, used, options.blocks);
  res.cross_variation = stats::rate_a_n(used, n, options.log_base) * stats::cross_variation_at(x1, x2, n, 1.0);
  res.scale = reference_scale(used, n, options.scale, options.log_base);
  const boost::math::normal normal;
  res.critical_value = boost::math::quantile(normal, 1.0 - options.level / 2.0);
  if (res.variance.degenerate) {
    res.decision = Decision::abstain;
    res.warnings.push_back("conditional variance estimate is degenerate");
    return res;
  }
  res.statistic = res.cross_variation / (res.scale * std::sqrt(res.variance.value));
  res.decision = std::abs(*res.statistic) > res.critical_value ? Decision::reject : Decision::accept;
  return res;
}

nlohmann::ordered_json to_json(const TestResult& r) {
  nlohmann::ordered_json j;
  j["decision"] = to_string(r.decision);
  j["statistic"] = r.statistic ? nlohmann::ordered_json(*r.statistic) : nlohmann::ordered_json(nullptr);
  j["level"] = r.level;
  j["critical_value"] = r.critical_value;
  j["hurst"] = r.hurst;
  j["regime"] = fbm::to_string(r.regime);
  j["n"] = r.n;
  j["a_n_J_n"] = r.cross_variation;
  j["scale"] = r.scale;
  j["scale_choice"] = to_string(r.scale_choice);
  j["variance_estimate"] = r.variance.value;
  j["blocks"] = r.variance.blocks;
  j["degenerate"] = r.variance.degenerate;
  if (r.hurst_estimate) {
    j["hurst_estimate"] = {{"value", r.hurst_estimate->value},
                           {"se", r.hurst_estimate->se},
                           {"boundary", r.hurst_estimate->boundary}};
  }
  j["warnings"] = r.warnings;
  return j;
}

}  // namespace crossvar::h0
