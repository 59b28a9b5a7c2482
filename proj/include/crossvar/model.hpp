#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>

#include "crossvar/fbm.hpp"
#include "crossvar/sigma.hpp"

namespace crossvar::young {

/// Simulated X = (X^{(1)}, X^{(2)}) together with its driving pair.
struct ModelPath {
  fbm::SamplePath x1;
  fbm::SamplePath x2;
  fbm::SamplePath b1;
  fbm::SamplePath b2;
  SigmaSpec sigma;
  std::size_t oversampling = 1;
};

/// X^{(i)}_t = x_i + int_0^t sigma^{i,1} dB^{(1)} + int_0^t sigma^{i,2} dB^{(2)},
/// each integral a left-point Young sum on the grid of the driving pair.
/// `oversampling` records the factor m between the driving grid and the
/// coarsest statistic resolution; the driving N must be a multiple of it.
/// Throws AssumptionViolation when (A) fails for (sigma.holder_exponent, H).
ModelPath simulate_x(const SigmaSpec& sigma, fbm::SamplePath b1, fbm::SamplePath b2,
                     fbm::Hurst hurst, std::size_t oversampling);

/// Draws the driving pair with generate_bivariate_fbm(hurst, intervals, horizon, seed)
/// and calls simulate_x.
ModelPath simulate_model(const SigmaSpec& sigma, fbm::Hurst hurst, std::size_t intervals,
                         double horizon, std::uint64_t seed, std::size_t oversampling);

struct Lemma1Estimate {
  std::size_t n = 0;
  std::size_t cell = 0;
  double e1 = 0.0;     // || int_cell (sigma_s - sigma_{k/n}) dB_s ||_{L2}
  double e1_se = 0.0;
  double e2 = 0.0;     // || int_cell sigma_s dB_s ||_{L2}
  double e2_se = 0.0;
};

/// Smallest oversampling accepted as a proxy for the exact cell integral.
inline constexpr std::size_t kMinLemma1Oversampling = 4;

/// L2 norms over `replications` draws of the two cell integrals of
/// sigma^{i,j} against B^{(j)} on the cell ((k-1)/n, k/n], with the exact
/// integral proxied by the left-point sum at resolution m n. Horizon is 1.
Lemma1Estimate lemma1_error(const SigmaSpec& sigma, fbm::Hurst hurst, std::size_t n,
                            std::size_t cell, std::size_t replications, std::uint64_t seed,
                            std::size_t oversampling = 8, std::pair<int, int> entry = {1, 1});

}  // namespace crossvar::young
