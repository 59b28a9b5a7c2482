#pragma once

#include <cstddef>
#include <optional>

#include "crossvar/fbm.hpp"

namespace crossvar::young {

/// C_{alpha,gamma} = (1/2) sum_{n>=1} 2^{-n(alpha+gamma-1)} = 1 / (2 (2^{alpha+gamma-1} - 1)).
/// Throws DivergentSeries when alpha + gamma <= 1.
double young_constant(double alpha, double gamma);

/// Cumulative left-point Riemann-Stieltjes sums:
/// out[k] = sum_{j<k} f(t_j) (g(t_{j+1}) - g(t_j)), out[0] = 0.
///
/// On each run of equal integrand values the partial sum is evaluated in
/// telescoped form f * (g_k - g_start), so a constant integrand reproduces
/// c * (g - g(0)) exactly.
fbm::SamplePath young_integrate(const fbm::SamplePath& f, const fbm::SamplePath& g);

struct RemainderReport {
  double lhs = 0.0;        // |int_a^b (f - f(a)) dg|
  double rhs = 0.0;        // C_{alpha,gamma} |f|_alpha |g|_gamma (b-a)^{alpha+gamma}
  double ratio = 0.0;      // lhs / rhs, 0 when lhs == 0
  double f_norm = 0.0;
  double g_norm = 0.0;
  double constant = 0.0;
};

/// Compares the local Young remainder on the grid window [a, b] with its
/// bound. Hölder norms default to the empirical seminorms of f and g over
/// [a, b]; analytic values may be supplied instead.
RemainderReport young_remainder_check(const fbm::SamplePath& f, const fbm::SamplePath& g,
                                      std::size_t a, std::size_t b, double alpha, double gamma,
                                      std::optional<double> f_norm = std::nullopt,
                                      std::optional<double> g_norm = std::nullopt);

}  // namespace crossvar::young
