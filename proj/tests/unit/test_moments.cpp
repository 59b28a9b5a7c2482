#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "crossvar/moments.hpp"

using namespace crossvar;

TEST_SUITE("moments") {

TEST_CASE("moments of a small sample") {
  const std::vector<double> x{1, 2, 3, 4, 10};
  const auto m = stats::sample_moments(x);
  CHECK(m.count == 5);
  CHECK(m.mean == doctest::Approx(4.0));
  CHECK(m.variance == doctest::Approx(12.5));
  // m2 = 10, m3 = 36 -> skewness 36 / 10^{1.5}
  CHECK(m.skewness == doctest::Approx(36.0 / std::pow(10.0, 1.5)));
  CHECK(m.se_mean == doctest::Approx(std::sqrt(12.5 / 5.0)));
}

TEST_CASE("order independence") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(1e6, 1.0);
  std::vector<double> x(5000);
  for (double& v : x) v = g(rng);
  const auto a = stats::sample_moments(x);
  std::shuffle(x.begin(), x.end(), rng);
  const auto b = stats::sample_moments(x);
  CHECK(std::abs(a.mean - b.mean) <= 1e-12 * std::abs(a.mean));
  CHECK(std::abs(a.variance - b.variance) <= 1e-12 * a.variance);
  CHECK(std::abs(a.excess_kurtosis - b.excess_kurtosis) <= 1e-9);
  CHECK(std::abs(a.variance - 1.0) < 0.1);
}

TEST_CASE("compensated sum") {
  std::vector<double> x{1e16, 1.0, -1e16, 1.0};
  CHECK(stats::compensated_sum(x) == 2.0);
}

TEST_CASE("ks distance") {
  CHECK(stats::ks_distance({1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK(stats::ks_distance({1, 2}, {3, 4}) == 1.0);
  CHECK(stats::ks_distance({1, 2, 3, 4}, {3, 4, 5, 6}) == doctest::Approx(0.5));
}

TEST_CASE("linear fit and correlation") {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> y{3, 5, 7, 9};
  const auto f = stats::linear_fit(x, y);
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.slope_se == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(f.r_squared == doctest::Approx(1.0));
  CHECK(stats::correlation(x, y) == doctest::Approx(1.0));
}

}
