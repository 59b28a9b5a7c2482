#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace crossvar::stats {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept;
  double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

double compensated_sum(std::span<const double> x) noexcept;

/// Moments of a sample; all sums compensated so permuting the sample leaves
/// the result unchanged to rounding of the final divisions.
struct SampleMoments {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;        // unbiased
  double skewness = 0.0;        // m3 / m2^{3/2}
  double excess_kurtosis = 0.0; // m4 / m2^2 - 3
  double se_mean = 0.0;
  double se_variance = 0.0;     // sqrt((m4 - m2^2) / n)
  double se_skewness = 0.0;
  double se_kurtosis = 0.0;
};

SampleMoments sample_moments(std::span<const double> x);

/// Two-sample Kolmogorov-Smirnov distance sup |F_a - F_b|.
double ks_distance(std::vector<double> a, std::vector<double> b);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares y = intercept + slope x. Needs at least 2 points;
/// the standard error needs 3.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

/// Pearson correlation.
double correlation(std::span<const double> a, std::span<const double> b);

}  // namespace crossvar::stats
