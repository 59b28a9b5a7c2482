#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "crossvar/fbm.hpp"
#include "crossvar/stats.hpp"

namespace crossvar::h0 {

/// Largest divisor of n not exceeding floor(sqrt(n)).
std::size_t default_block_count(std::size_t n);

struct VarianceEstimate {
  double value = 0.0;
  std::size_t blocks = 0;
  std::vector<double> v1;  // per-block normalized quadratic variation of X1
  std::vector<double> v2;
  std::size_t zero_blocks = 0;
  bool degenerate = false;  // value <= 0 or not finite
};

/// V = (1/L) sum_l v1_l v2_l with v_l = L n^{2H-1} sum_{k in block l} (dX_{k/n})^2,
/// over the cells of [0, 1]. An explicit block count must divide n.
VarianceEstimate estimate_conditional_variance(const fbm::SamplePath& x1, const fbm::SamplePath& x2,
                                               std::size_t n, fbm::Hurst hurst,
                                               std::optional<std::size_t> blocks = std::nullopt);

/// Reference scale dividing a_n J_n(1).
///   exact_finite_n : sd of a_n J_n(1) for identity sigma at this n
///   square_root    : sqrt(S_H) / 2 (or its critical analogue)
///   unrooted       : C_H / 2 with C_H = S_H / sqrt(2)
enum class ScaleChoice { exact_finite_n, square_root, unrooted };

std::string_view to_string(ScaleChoice s) noexcept;
ScaleChoice scale_choice_from_string(std::string_view name);

double reference_scale(fbm::Hurst hurst, std::size_t n, ScaleChoice choice,
                       stats::LogBase base = stats::LogBase::natural);

enum class Decision { accept, reject, abstain };

std::string_view to_string(Decision d) noexcept;

struct TestOptions {
  double level = 0.05;
  std::optional<std::size_t> blocks;
  ScaleChoice scale = ScaleChoice::exact_finite_n;
  stats::LogBase log_base = stats::LogBase::natural;
  bool estimate_hurst = false;  // plug in the estimate from the data instead of the given H
};

struct TestResult {
  std::optional<double> statistic;  // empty when abstaining
  double cross_variation = 0.0;     // a_n J_n(1)
  double scale = 0.0;
  ScaleChoice scale_choice = ScaleChoice::exact_finite_n;
  double level = 0.05;
  double critical_value = 0.0;
  Decision decision = Decision::abstain;
  fbm::Regime regime = fbm::Regime::subcritical;
  double hurst = 0.0;  // value actually used
  std::optional<stats::HurstEstimate> hurst_estimate;
  std::size_t n = 0;
  VarianceEstimate variance;
  std::vector<std::string> warnings;
};

/// Studentized test of a vanishing off-diagonal coefficient at t = 1.
/// Throws UnsupportedRegime for H > 3/4 (also for a plug-in estimate) and
/// std::invalid_argument for a level outside (0, 1).
TestResult test_zero_cross(const fbm::SamplePath& x1, const fbm::SamplePath& x2, std::size_t n,
                           fbm::Hurst hurst, const TestOptions& options = {});

nlohmann::ordered_json to_json(const TestResult& r);

}  // namespace crossvar::h0
