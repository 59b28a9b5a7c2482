#include <doctest.h>

#include <cmath>
#include <vector>

#include "crossvar/errors.hpp"
#include "crossvar/fbm.hpp"
#include "crossvar/moments.hpp"
#include "crossvar/seeding.hpp"
#include "crossvar/stats.hpp"

using namespace crossvar;
using fbm::Hurst;

TEST_SUITE("stats") {

TEST_CASE("rates") {
  CHECK(stats::rate_a_n(Hurst(0.6), 100) == doctest::Approx(25.1189).epsilon(1e-5));
  CHECK(stats::rate_a_n(Hurst(0.75), 100) == doctest::Approx(46.599).epsilon(1e-5));
  CHECK(stats::rate_a_n(Hurst(0.75), 100, stats::LogBase::ten) == doctest::Approx(100.0 / std::sqrt(2.0)));
  CHECK(stats::rate_a_n(Hurst(0.9), 100) == 100.0);
  CHECK_THROWS_AS(stats::rate_a_n(Hurst(0.5), 100), UnsupportedRegime);
}

TEST_CASE("floor counts") {
  CHECK(stats::floor_count(0.3, 10) == 3);  // 0.3 * 10 = 2.9999999999999996
  CHECK(stats::floor_count(1.0, 4096) == 4096);
  CHECK(stats::floor_count(0.999, 1000) == 999);
  CHECK(stats::floor_count(3, 10, 10) == 3);
  CHECK(stats::floor_count(1, 3, 7) == 2);
}

TEST_CASE("cross variation on a hand example") {
  // x1 = t, x2 = t^2 on 4 intervals; J_2(1) = (1/2)(1/4) + (1/2)(3/4)
  const auto x1 = fbm::sample_function([](double t) { return t; }, 4, 1.0);
  const auto x2 = fbm::sample_function([](double t) { return t * t; }, 4, 1.0);
  CHECK(stats::cross_variation_at(x1, x2, 2, 1.0) == doctest::Approx(0.5));
  CHECK(stats::cross_variation_at(x1, x2, 2, 0.5) == doctest::Approx(0.125));
  CHECK(stats::quadratic_variation(x1, 4, 1.0) == doctest::Approx(0.25));
  CHECK_THROWS_AS(stats::cross_variation_at(x1, x2, 3, 1.0), GridMismatch);
  const std::vector<double> t{1.0};
  CHECK_THROWS(stats::cross_variation(x1, x2, 2, t, stats::Normalization::a_n));
}

TEST_CASE("rosenblatt difference and degenerate input") {
  const auto [b1, b2] = fbm::generate_bivariate_fbm(Hurst(0.85), 1024, 1.0, 2);
  const auto [beta1, beta2] = fbm::rotate(b1, b2);
  const double r = stats::rosenblatt_difference(beta1, beta2, 256, 1.0);
  const double j = 256.0 * stats::cross_variation_at(b1, b2, 256, 1.0);
  CHECK(r == doctest::Approx(2.0 * j).epsilon(1e-10));
  CHECK(stats::rosenblatt_difference(beta1, beta1, 256, 1.0) == 0.0);
  CHECK(stats::cross_variation_at(beta1, fbm::SamplePath(1.0, std::vector<double>(1025, 0.0)), 256, 1.0) == 0.0);
}

TEST_CASE("weighted sum with unit weight equals J_n") {
  const auto [b1, b2] = fbm::generate_bivariate_fbm(Hurst(0.65), 512, 1.0, 5);
  const std::vector<double> ones(513, 1.0);
  CHECK(stats::weighted_sum(ones, b1, b2, 128, 0.75) == stats::cross_variation_at(b1, b2, 128, 0.75));
}

TEST_CASE("xi second moment matches the brute-force double sum") {
  const Hurst h(0.7);
  const std::size_t n = 64, i = 5, j = 40;
  double brute = 0.0;
  for (std::size_t k = i + 1; k <= j; ++k) {
    for (std::size_t l = i + 1; l <= j; ++l) {
      const double rho = fbm::fgn_autocovariance(h, static_cast<long long>(k) - static_cast<long long>(l));
      brute += rho * rho;
    }
  }
  const double a = stats::rate_a_n(h, n);
  CHECK(stats::xi_second_moment(h, n, i, j) ==
        doctest::Approx(a * a * std::pow(64.0, -2.8) * brute).epsilon(1e-12));
  CHECK(stats::xi_second_moment(h, n, 7, 7) == 0.0);
  CHECK_THROWS(stats::xi_second_moment(h, n, 10, 65));
}

TEST_CASE("xi second moment against Monte Carlo") {
  const Hurst h(0.6);
  const std::size_t n = 64;
  const double a = stats::rate_a_n(h, n);
  std::vector<double> sq;
  for (std::uint64_t r = 0; r < 2000; ++r) {
    const auto [b1, b2] = fbm::generate_bivariate_fbm(h, n, 1.0, replicate_seed(21, r));
    const double s = a * stats::cross_variation_at(b1, b2, n, 1.0);
    sq.push_back(s * s);
  }
  const auto m = stats::sample_moments(sq);
  CHECK(std::abs(m.mean - stats::xi_second_moment(h, n, 0, n)) < 3.0 * m.se_mean);
}

TEST_CASE("h2 bound") {
  const std::vector<std::size_t> grid{256, 1024, 4096};
  const auto r = stats::h2_bound_check(Hurst(0.6), grid);
  CHECK(r.bound_holds);
  CHECK(r.spread < 0.2);
  CHECK(r.levels.size() == 3);
  CHECK(r.levels[0].unit_ratio > 0.0);
}

TEST_CASE("hurst estimate") {
  for (double h : {0.6, 0.8}) {
    const auto p = fbm::generate_fbm_path(Hurst(h), 1 << 14, 1.0, 99);
    const auto e = stats::estimate_hurst(p);
    CHECK(e.value == doctest::Approx(h).epsilon(0.05));
    CHECK_FALSE(e.boundary);
  }
  const auto flat = fbm::sample_function([](double) { return 0.0; }, 100, 1.0);
  CHECK_THROWS(stats::estimate_hurst(flat));
}

}
