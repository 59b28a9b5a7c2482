#include "crossvar/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "crossvar/errors.hpp"
#include "crossvar/seeding.hpp"
#include "crossvar/young.hpp"

namespace crossvar::young {
namespace {

// x + int sigma^{i,1} dB1 + int sigma^{i,2} dB2; zero coefficients contribute
// nothing, so sigma = identity gives x + B exactly.
fbm::SamplePath component(double start, const Coefficient& c1, const Coefficient& c2,
                          const fbm::SamplePath& b1, const fbm::SamplePath& b2, int index) {
  const std::size_t size = b1.intervals() + 1;
  std::vector<double> acc(size, 0.0);
  bool any = false;
  auto add = [&](const Coefficient& c, const fbm::SamplePath& b) {
    if (c.is_zero()) return;
    const fbm::SamplePath integrand(b1.horizon(), c.sample(b1, b2));
    const fbm::SamplePath integral = young_integrate(integrand, b);
    if (!any) {
      for (std::size_t k = 0; k < size; ++k) acc[k] = integral[k];
      any = true;
    } else {
      for (std::size_t k = 0; k < size; ++k) acc[k] += integral[k];
    }
  };
  add(c1, b1);
  add(c2, b2);
  std::vector<double> values(size);
  for (std::size_t k = 0; k < size; ++k) values[k] = start + acc[k];
  fbm::PathMeta meta = b1.meta();
  meta.generator = "model-x";
  meta.component = index;
  return fbm::SamplePath(b1.horizon(), std::move(values), std::move(meta));
}

}  // namespace

ModelPath simulate_x(const SigmaSpec& sigma, fbm::SamplePath b1, fbm::SamplePath b2,
                     fbm::Hurst hurst, std::size_t oversampling) {
  check_assumption_a(sigma.holder_exponent, hurst);
  fbm::require_same_grid(b1, b2, "simulate_x");
  if (oversampling == 0 || b1.intervals() % oversampling != 0) {
    throw GridMismatch("simulate_x: driving N=" + std::to_string(b1.intervals()) +
                       " is not a multiple of the oversampling factor " +
                       std::to_string(oversampling));
  }
  fbm::SamplePath x1 = component(sigma.start[0], sigma(1, 1), sigma(1, 2), b1, b2, 1);
  fbm::SamplePath x2 = component(sigma.start[1], sigma(2, 1), sigma(2, 2), b1, b2, 2);
  return ModelPath{std::move(x1), std::move(x2), std::move(b1), std::move(b2), sigma, oversampling};
}

ModelPath simulate_model(const SigmaSpec& sigma, fbm::Hurst hurst, std::size_t intervals,
                         double horizon, std::uint64_t seed, std::size_t oversampling) {
  check_assumption_a(sigma.holder_exponent, hurst);
  auto [b1, b2] = fbm::generate_bivariate_fbm(hurst, intervals, horizon, seed);
  return simulate_x(sigma, std::move(b1), std::move(b2), hurst, oversampling);
}

Lemma1Estimate lemma1_error(const SigmaSpec& sigma, fbm::Hurst hurst, std::size_t n,
                            std::size_t cell, std::size_t replications, std::uint64_t seed,
                            std::size_t oversampling, std::pair<int, int> entry) {
  check_assumption_a(sigma.holder_exponent, hurst);
  if (oversampling < kMinLemma1Oversampling) {
    throw std::invalid_argument("lemma1_error: oversampling " + std::to_string(oversampling) +
                                " < " + std::to_string(kMinLemma1Oversampling) +
                                " is too coarse a proxy for the exact integral");
  }
  if (n < 1 || cell < 1 || cell > n) throw std::invalid_argument("lemma1_error: cell outside 1..n");
  if (replications < 2) throw std::invalid_argument("lemma1_error: need >= 2 replications");
  const auto [i, j] = entry;
  if (i < 1 || i > 2 || j < 1 || j > 2) throw std::invalid_argument("lemma1_error: bad entry");

  const Coefficient& coef = sigma(i, j);
  const std::size_t fine = n * oversampling;
  const std::size_t first = (cell - 1) * oversampling;
  const std::size_t last = cell * oversampling;

  std::vector<double> sq1(replications), sq2(replications);
  for (std::size_t r = 0; r < replications; ++r) {
    const auto [b1, b2] = fbm::generate_bivariate_fbm(hurst, fine, 1.0, replicate_seed(seed, r));
    const fbm::SamplePath& b = j == 1 ? b1 : b2;
    const std::vector<double> s = coef.sample(b1, b2);
    const double frozen = s[last];
    double centered = 0.0;
    double full = 0.0;
    for (std::size_t l = first; l < last; ++l) {
      const double db = b[l + 1] - b[l];
      centered += (s[l] - frozen) * db;
      full += s[l] * db;
    }
    sq1[r] = centered * centered;
    sq2[r] = full * full;
  }

  auto l2 = [](const std::vector<double>& sq, double& se) {
    const double m = static_cast<double>(sq.size());
    double mean = 0.0;
    for (double v : sq) mean += v;
    mean /= m;
    double ss = 0.0;
    for (double v : sq) ss += (v - mean) * (v - mean);
    const double se_mean = std::sqrt(ss / (m - 1.0) / m);
    const double norm = std::sqrt(mean);
    se = norm > 0.0 ? se_mean / (2.0 * norm) : 0.0;
    return norm;
  };

  Lemma1Estimate est;
  est.n = n;
  est.cell = cell;
  est.e1 = l2(sq1, est.e1_se);
  est.e2 = l2(sq2, est.e2_se);
  return est;
}

}  // namespace crossvar::young
