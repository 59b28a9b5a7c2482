#include <doctest.h>

#include <cmath>

#include "crossvar/errors.hpp"
#include "crossvar/fbm.hpp"
#include "crossvar/young.hpp"

using namespace crossvar;

namespace {
const double kCosDSin = 0.5 + std::sin(2.0) / 4.0;  // int_0^1 cos^2

double cos_dsin(std::size_t n) {
  const auto f = fbm::sample_function([](double t) { return std::cos(t); }, n, 1.0);
  const auto g = fbm::sample_function([](double t) { return std::sin(t); }, n, 1.0);
  return young::young_integrate(f, g)[n];
}
}  // namespace

TEST_SUITE("young") {

TEST_CASE("young constant") {
  CHECK(young::young_constant(0.9, 0.9) == doctest::Approx(0.674672).epsilon(1e-6));
  CHECK(young::young_constant(0.6, 0.6) == doctest::Approx(1.0 / (2.0 * (std::pow(2.0, 0.2) - 1.0))));
  CHECK_THROWS_AS(young::young_constant(0.5, 0.5), DivergentSeries);
  CHECK_THROWS_AS(young::young_constant(0.3, 0.4), DivergentSeries);
}

TEST_CASE("cos d(sin) converges at first order") {
  CHECK(kCosDSin == doctest::Approx(0.727324).epsilon(1e-6));
  double prev = std::abs(cos_dsin(64) - kCosDSin);
  for (std::size_t n = 128; n <= 8192; n *= 2) {
    const double err = std::abs(cos_dsin(n) - kCosDSin);
    CHECK(std::log2(prev / err) > 0.99);
    prev = err;
  }
  CHECK(prev < 1e-4);
}

TEST_CASE("constant integrand is exact") {
  const auto g = fbm::generate_fbm_path(fbm::Hurst(0.7), 500, 1.0, 4);
  const auto f = fbm::sample_function([](double) { return 2.5; }, 500, 1.0);
  const auto i = young::young_integrate(f, g);
  for (std::size_t k = 0; k <= 500; ++k) CHECK(i[k] == 2.5 * (g[k] - g[0]));
}

TEST_CASE("linearity and additivity over intervals") {
  const auto [b1, b2] = fbm::generate_bivariate_fbm(fbm::Hurst(0.7), 1024, 1.0, 8);
  const auto f1 = fbm::sample_function([](double t) { return std::sin(3 * t); }, 1024, 1.0);
  const auto f2 = fbm::sample_function([](double t) { return 1 + t * t; }, 1024, 1.0);
  std::vector<double> comb(1025);
  for (std::size_t k = 0; k <= 1024; ++k) comb[k] = 2.0 * f1[k] - 0.5 * f2[k];
  const fbm::SamplePath f(1.0, comb);
  const auto lhs = young::young_integrate(f, b1);
  const auto i1 = young::young_integrate(f1, b1);
  const auto i2 = young::young_integrate(f2, b1);
  const double want = 2.0 * i1[1024] - 0.5 * i2[1024];
  CHECK(std::abs(lhs[1024] - want) <= 1e-12 * std::max(1.0, std::abs(want)));

  // integral over [0, c] = [0, b] + [b, c]
  const auto whole = young::young_integrate(f1, b2);
  double piece = 0.0;
  for (std::size_t k = 300; k < 700; ++k) piece += f1[k] * (b2[k + 1] - b2[k]);
  CHECK(std::abs(whole[700] - (whole[300] + piece)) <= 1e-12 * std::max(1.0, std::abs(whole[700])));
}

TEST_CASE("grid mismatch") {
  const auto f = fbm::sample_function([](double t) { return t; }, 10, 1.0);
  const auto g = fbm::sample_function([](double t) { return t; }, 20, 1.0);
  CHECK_THROWS_AS(young::young_integrate(f, g), GridMismatch);
}

TEST_CASE("local remainder stays under the Young bound") {
  const fbm::Hurst h(0.75);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto [b1, b2] = fbm::generate_bivariate_fbm(h, 2048, 1.0, s);
    const auto r = young::young_remainder_check(b1, b2, 512, 1536, 0.6, 0.6);
    CHECK(r.ratio <= 1.0);
    CHECK(r.rhs > 0.0);
    CHECK(r.constant == doctest::Approx(young::young_constant(0.6, 0.6)));
  }
  // smooth f, g: (f - f(a)) dg is second order in the window length
  const auto f = fbm::sample_function([](double t) { return t * t; }, 1000, 1.0);
  const auto r = young::young_remainder_check(f, f, 0, 1000, 1.0, 1.0, 2.0, 2.0);
  CHECK(r.ratio <= 1.0);
}

}
