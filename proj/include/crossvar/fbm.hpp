#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace crossvar::fbm {

enum class Regime { subcritical, critical, supercritical };

std::string_view to_string(Regime regime) noexcept;

/// Hurst index with its regime relative to 3/4. The critical value compares
/// exactly against 0.75, which is representable.
class Hurst {
 public:
  /// Throws AssumptionViolation unless 0 < h < 1.
  explicit Hurst(double h);

  double value() const noexcept { return h_; }
  Regime regime() const noexcept;

  /// Model-level operations need long memory (H > 1/2).
  void require_long_memory() const;

 private:
  double h_;
};

struct PathMeta {
  double hurst = 0.0;
  std::uint64_t seed = 0;
  std::string generator = "deterministic";
  int component = 0;
  bool fallback = false;  // dense factorization was used instead of circulant embedding
};

/// A function sampled on the uniform grid t_k = k T / N, k = 0..N.
class SamplePath {
 public:
  SamplePath(double horizon, std::vector<double> values, PathMeta meta = {});

  std::size_t intervals() const noexcept { return values_.size() - 1; }
  double horizon() const noexcept { return horizon_; }
  double step() const noexcept { return horizon_ / static_cast<double>(intervals()); }
  double time(std::size_t k) const noexcept {
    return horizon_ * static_cast<double>(k) / static_cast<double>(intervals());
  }

  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t k) const noexcept { return values_[k]; }
  const PathMeta& meta() const noexcept { return meta_; }

  bool same_grid(const SamplePath& other) const noexcept {
    return intervals() == other.intervals() && horizon_ == other.horizon_;
  }

 private:
  double horizon_;
  std::vector<double> values_;
  PathMeta meta_;
};

/// Samples f on the uniform grid with N intervals over [0, T].
template <typename F>
SamplePath sample_function(F&& f, std::size_t intervals, double horizon) {
  std::vector<double> v(intervals + 1);
  for (std::size_t k = 0; k <= intervals; ++k) {
    v[k] = f(horizon * static_cast<double>(k) / static_cast<double>(intervals));
  }
  return SamplePath(horizon, std::move(v));
}

/// Throws GridMismatch when the two paths are not on the same grid.
void require_same_grid(const SamplePath& a, const SamplePath& b, std::string_view what);

/// Unit-lag fractional Gaussian noise autocovariance
/// rho(r) = (|r+1|^{2H} + |r-1|^{2H} - 2|r|^{2H}) / 2.
double fgn_autocovariance(Hurst hurst, long long lag) noexcept;

/// Cov(B_s, B_t) = (s^{2H} + t^{2H} - |t-s|^{2H}) / 2.
double fbm_covariance(Hurst hurst, double s, double t);

enum class SamplerMethod {
  automatic,  // circulant embedding, dense fallback if the embedding is not PSD
  circulant,  // circulant embedding only; throws if not PSD
  dense,      // Cholesky factor of the full increment covariance
};

struct GeneratorOptions {
  SamplerMethod method = SamplerMethod::automatic;
};

/// Largest N for which the dense factorization is attempted.
inline constexpr std::size_t kDenseLimit = 4096;

/// Exact fBm on N intervals over [0, T]. The increments are fractional
/// Gaussian noise with covariance (T/N)^{2H} rho(i - j). The engine is seeded
/// with component_seed(seed, component), so the path is a pure function of
/// (H, N, T, seed, component, method).
SamplePath generate_fbm_path(Hurst hurst, std::size_t intervals, double horizon,
                             std::uint64_t seed, int component = 0,
                             GeneratorOptions options = {});

/// Two independent fBm components with the same H. Component ids default to
/// (0, 1); passing (1, 0) returns the same two paths swapped.
std::pair<SamplePath, SamplePath> generate_bivariate_fbm(
    Hurst hurst, std::size_t intervals, double horizon, std::uint64_t seed,
    std::pair<int, int> components = {0, 1}, GeneratorOptions options = {});

/// beta1 = (B1 + B2)/sqrt(2), beta2 = (B1 - B2)/sqrt(2).
std::pair<SamplePath, SamplePath> rotate(const SamplePath& b1, const SamplePath& b2);

/// Inverse of rotate.
std::pair<SamplePath, SamplePath> unrotate(const SamplePath& beta1, const SamplePath& beta2);

/// Largest N for which holder_norm scans every pair of grid points. Above it
/// only pairs separated by a dyadic number of steps are scanned.
inline constexpr std::size_t kHolderExactLimit = 4096;

/// Discrete Hölder seminorm max |f(t)-f(s)| / (t-s)^alpha over grid pairs, alpha in (0, 1].
double holder_norm(const SamplePath& path, double alpha);

/// Same as holder_norm, restricted to the grid window [first, last].
double holder_norm(const SamplePath& path, double alpha, std::size_t first, std::size_t last);

struct GrrLevel {
  std::size_t intervals = 0;
  double lhs_moment = 0.0;     // E |B|_alpha^q
  double lhs_se = 0.0;
  double rhs_moment = 0.0;     // E of the discretized double integral
  double rhs_se = 0.0;
  double ratio = 0.0;          // lhs_moment / rhs_moment
};

struct GrrReport {
  double hurst = 0.0;
  double alpha = 0.0;
  double q = 0.0;
  std::size_t replications = 0;
  bool alpha_in_range = true;  // alpha < H
  bool rhs_integrable = true;  // q (H - alpha) > 1, else the double integral has infinite mean
  std::vector<GrrLevel> levels;
  double max_ratio = 0.0;
  double lhs_spread = 0.0;     // max/min - 1 of the moment across levels
};

/// Monte Carlo comparison of E|B|_alpha^q with the double integral
/// iint |B_u - B_v|^q / |u-v|^{2 + q alpha} du dv on [0,1]^2, at each N of the grid.
GrrReport grr_moment_check(Hurst hurst, double alpha, double q, std::size_t replications,
                           std::span<const std::size_t> grid_sizes, std::uint64_t seed);

}  // namespace crossvar::fbm
