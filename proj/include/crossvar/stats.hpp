#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "crossvar/fbm.hpp"

namespace crossvar::stats {

/// Base of the logarithm in the critical rate n / sqrt(log n).
enum class LogBase { natural, two, ten };

std::string_view to_string(LogBase base) noexcept;
LogBase log_base_from_string(std::string_view name);

/// a_n = n^{2H-1/2} (1/2 < H < 3/4), n / sqrt(log n) (H = 3/4), n (3/4 < H < 1).
double rate_a_n(fbm::Hurst hurst, std::size_t n, LogBase base = LogBase::natural);

/// floor(n t) with a guard of 1e-9 n against representation error in t.
std::size_t floor_count(double t, std::size_t n);

/// floor(n p / q) in integer arithmetic.
std::size_t floor_count(std::size_t numerator, std::size_t denominator, std::size_t n);

/// Number of fine grid steps per cell of width 1/n; throws GridMismatch if the
/// path grid is not a refinement of the 1/n lattice.
std::size_t resolution_stride(const fbm::SamplePath& path, std::size_t n);

enum class Normalization { none, power_2h_minus_1, a_n };

std::string_view to_string(Normalization norm) noexcept;

struct CrossVariationSeries {
  std::size_t n = 0;
  std::vector<double> tgrid;
  std::vector<double> values;
  Normalization normalization = Normalization::none;
  double factor = 1.0;  // multiplier applied to the raw sums
};

/// J_n(t) = sum_{k <= floor(nt)} dX1_{k/n} dX2_{k/n} at each t in tgrid, times
/// the requested normalization. Hurst is required unless normalization is none.
CrossVariationSeries cross_variation(const fbm::SamplePath& x1, const fbm::SamplePath& x2,
                                     std::size_t n, std::span<const double> tgrid,
                                     Normalization normalization = Normalization::none,
                                     std::optional<fbm::Hurst> hurst = std::nullopt,
                                     LogBase base = LogBase::natural);

/// Single-time raw J_n(t).
double cross_variation_at(const fbm::SamplePath& x1, const fbm::SamplePath& x2, std::size_t n,
                          double t);

/// sum_{k <= floor(nt)} (dX_{k/n})^2
double quadratic_variation(const fbm::SamplePath& x, std::size_t n, double t);

/// n^{1-2H} sum_{k <= floor(nt)} [n^{2H} (d beta_{k/n})^2 - 1]
double taqqu_stat(const fbm::SamplePath& beta, std::size_t n, double t, fbm::Hurst hurst);

/// n sum_{k <= floor(nt)} [(d beta1_{k/n})^2 - (d beta2_{k/n})^2]
double rosenblatt_difference(const fbm::SamplePath& beta1, const fbm::SamplePath& beta2,
                             std::size_t n, double t);

/// K_n(t) = sum_{k <= floor(nt)} u_{k/n} dB1_{k/n} dB2_{k/n}; u lives on the grid of B.
double weighted_sum(const fbm::SamplePath& u, const fbm::SamplePath& b1,
                    const fbm::SamplePath& b2, std::size_t n, double t);

/// Same with u given directly as values on the grid of B (N+1 entries).
double weighted_sum(std::span<const double> u, const fbm::SamplePath& b1,
                    const fbm::SamplePath& b2, std::size_t n, double t);

/// E[(sum_{k=i+1}^{j} xi_{k,n})^2] = a_n^2 n^{-4H} sum_{k,k'=i+1}^{j} rho(k-k')^2
/// with xi_{k,n} = a_n dB1_{k/n} dB2_{k/n}. Requires 0 <= i <= j <= floor(nT).
double xi_second_moment(fbm::Hurst hurst, std::size_t n, std::size_t i, std::size_t j,
                        double horizon = 1.0, LogBase base = LogBase::natural);

struct H2Level {
  std::size_t n = 0;
  double constant = 0.0;        // a_n^2 n^{1-4H} sum_{|r| <= nT} rho(r)^2
  double max_ratio = 0.0;       // max over tested (i,j) of moment / (C (j-i)/n)
  double unit_ratio = 0.0;      // the same ratio at j - i = 1
  std::size_t pairs_checked = 0;
};

struct H2Report {
  double hurst = 0.0;
  std::vector<H2Level> levels;
  double sup_constant = 0.0;
  double min_constant = 0.0;
  double spread = 0.0;          // sup / min - 1
  bool bound_holds = true;      // every ratio <= 1
};

/// Checks the second-moment bound E[(sum xi)^2] <= C (j-i)/n on a grid of
/// (i, j) for every n in the grid, with the constant C_n defined above.
H2Report h2_bound_check(fbm::Hurst hurst, std::span<const std::size_t> n_grid,
                        double horizon = 1.0, LogBase base = LogBase::natural);

struct HurstEstimate {
  double value = 0.0;
  double se = 0.0;
  std::vector<std::size_t> lags;        // fine-grid lags used, 1, 2, 4, ...
  std::vector<double> log_variation;    // log of the quadratic variation at each lag
  bool boundary = false;                // estimate within 1e-3 of 0 or 1
};

/// Log-log regression of the quadratic variation over `scales` dyadic lags:
/// QV(lag) ~ lag^{2H-1}. Throws std::invalid_argument for fewer than 3 scales
/// or a constant path.
HurstEstimate estimate_hurst(const fbm::SamplePath& x, std::size_t scales = 5);

}  // namespace crossvar::stats
