#include "crossvar/constants.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_zeta.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "crossvar/errors.hpp"

namespace crossvar::stats {
namespace {

double second_difference(double two_h, double k) {
  const double r = std::abs(k);
  return std::pow(r + 1.0, two_h) + std::pow(std::abs(r - 1.0), two_h) - 2.0 * std::pow(r, two_h);
}

// binom(a, k) for real a
double binomial(double a, int k) {
  double c = 1.0;
  for (int i = 0; i < k; ++i) c *= (a - i) / (i + 1);
  return c;
}

double hurwitz_zeta(double s, double q) {
  gsl_sf_result result;
  const int status = gsl_sf_hzeta_e(s, q, &result);
  if (status != GSL_SUCCESS) throw std::runtime_error("gsl_sf_hzeta failed");
  return result.val;
}

constexpr std::size_t kDirectRadius = 256;
constexpr int kMaxOrder = 60;

}  // namespace

std::string_view to_string(LimitKind kind) noexcept {
  switch (kind) {
    case LimitKind::series_s: return "S_H";
    case LimitKind::c_h: return "C_H";
    case LimitKind::c_critical: return "C_3/4";
  }
  return "S_H";
}

std::string_view to_string(ConstantVariant v) noexcept {
  return v == ConstantVariant::unrooted ? "unrooted" : "square_root";
}

double breuer_major_partial_sum(fbm::Hurst hurst, std::size_t radius) {
  const double two_h = 2.0 * hurst.value();
  const long long r = static_cast<long long>(radius);
  double s = 0.0;
  for (long long k = -r; k <= r; ++k) {
    const double d = second_difference(two_h, static_cast<double>(k));
    s += d * d;
  }
  return s;
}

LimitConstant breuer_major_series(fbm::Hurst hurst, double tol) {
  const double h = hurst.value();
  if (!(h < 0.75)) {
    throw DivergentSeries("Breuer-Major series diverges for H >= 3/4 (H=" + std::to_string(h) + ")");
  }
  gsl_set_error_handler_off();
  const double two_h = 2.0 * h;

  LimitConstant c;
  c.hurst = h;
  c.kind = LimitKind::series_s;
  c.radius = kDirectRadius;

  double one_sided = 0.0;
  for (std::size_t k = kDirectRadius; k >= 1; --k) {
    const double d = second_difference(two_h, static_cast<double>(k));
    one_sided += d * d;
  }
  const double center = second_difference(two_h, 0.0);

  // 2 rho(k) = 2 sum_{m>=1} c_m k^{2H-2m}, so (2 rho(k))^2 = 4 sum_{p>=2} D_p k^{4H-2p}.
  std::vector<double> cm(kMaxOrder + 1, 0.0);
  for (int m = 1; m <= kMaxOrder; ++m) cm[m] = binomial(two_h, 2 * m);
  const double q = static_cast<double>(kDirectRadius) + 1.0;
  double tail = 0.0;
  double last = 0.0;
  for (int p = 2; p <= kMaxOrder; ++p) {
    double dp = 0.0;
    for (int m = 1; m < p; ++m) dp += cm[m] * cm[p - m];
    const double term = 4.0 * dp * hurwitz_zeta(2.0 * p - 2.0 * two_h, q);
    tail += term;
    last = std::abs(term);
    if (p >= 3 && last < tol * 1e-3) break;
  }
  c.tail = 2.0 * tail;
  // Successive terms shrink by roughly q^{-2}; the dropped remainder is below
  // the last term kept.
  c.tail_error = 2.0 * last;
  c.value = center * center + 2.0 * one_sided + c.tail;
  return c;
}

LimitConstant c_constant(fbm::Hurst hurst, ConstantVariant variant) {
  const double h = hurst.value();
  if (h > 0.75) {
    throw UnsupportedRegime("C_H is undefined for H > 3/4 (Rosenblatt regime)");
  }
  if (hurst.regime() == fbm::Regime::critical) {
    LimitConstant c;
    c.hurst = h;
    c.kind = LimitKind::c_critical;
    const double base = 3.0 * std::numbers::sqrt2 / 4.0;
    c.value = variant == ConstantVariant::unrooted ? base * std::numbers::ln2 : base;
    return c;
  }
  LimitConstant c = breuer_major_series(hurst);
  c.kind = LimitKind::c_h;
  c.value = variant == ConstantVariant::unrooted ? c.value / std::numbers::sqrt2 : std::sqrt(c.value);
  return c;
}

}  // namespace crossvar::stats
