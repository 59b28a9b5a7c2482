#pragma once

#include <cstddef>
#include <string_view>

#include "crossvar/fbm.hpp"

namespace crossvar::stats {

enum class LimitKind { series_s, c_h, c_critical };

std::string_view to_string(LimitKind kind) noexcept;

struct LimitConstant {
  double hurst = 0.0;
  LimitKind kind = LimitKind::series_s;
  double value = 0.0;
  std::size_t radius = 0;   // terms |k| <= radius summed directly
  double tail = 0.0;        // contribution of |k| > radius
  double tail_error = 0.0;  // bound on the error of the tail evaluation
};

/// S_H = sum_{|k| <= radius} (|k+1|^{2H} + |k-1|^{2H} - 2|k|^{2H})^2.
double breuer_major_partial_sum(fbm::Hurst hurst, std::size_t radius);

/// S_H = sum_{k in Z} (|k+1|^{2H} + |k-1|^{2H} - 2|k|^{2H})^2 for H < 3/4.
///
/// Terms |k| <= radius are summed directly. For k > radius the binomial
/// expansion 2 rho(k) = 2 sum_{m>=1} binom(2H, 2m) k^{2H-2m} is squared and
/// summed term by term with Hurwitz zeta values; the expansion is truncated
/// once the next term falls below tol. Throws DivergentSeries for H >= 3/4.
LimitConstant breuer_major_series(fbm::Hurst hurst, double tol = 1e-12);

/// Which scale to attach to the mixed-normal limit.
enum class ConstantVariant {
  unrooted,     // C_H = S_H / sqrt(2); C_{3/4} = (3 sqrt(2) / 4) log 2
  square_root,  // C_H = sqrt(S_H);     C_{3/4} = 3 sqrt(2) / 4
};

std::string_view to_string(ConstantVariant v) noexcept;

/// C_H for H < 3/4 and C_{3/4} at H = 3/4 (natural log). Defined for
/// 0 < H <= 3/4; throws UnsupportedRegime above.
LimitConstant c_constant(fbm::Hurst hurst, ConstantVariant variant = ConstantVariant::unrooted);

}  // namespace crossvar::stats
