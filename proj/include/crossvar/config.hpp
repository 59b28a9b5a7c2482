#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "crossvar/sigma.hpp"
#include "crossvar/stats.hpp"

namespace crossvar::lab {

enum class ExperimentId { theorem1, theorem2, dyadic_cauchy, prop1, lemma2, lemma1_rates };

std::string_view to_string(ExperimentId id) noexcept;
ExperimentId experiment_from_string(std::string_view name);

/// Gates; each one is active only when its key is present in the config.
struct Tolerances {
  std::optional<double> mean_abs;             // |mean - reference| <= value
  std::optional<double> mean_se;              // |mean - reference| <= value * SE
  std::optional<double> epsilon;              // exceedance level for P(|stat - limit| > eps)
  bool exceedance_monotone = false;           // exceedance nonincreasing along the n grid
  std::optional<double> skewness;             // |skewness| < value at the largest n
  std::optional<double> excess_kurtosis;      // |excess kurtosis| < value at the largest n
  std::optional<double> variance_stability;   // pairwise |v_a - v_b| / min <= value
  std::optional<double> constant_match;       // some candidate sd within this relative error
  std::optional<double> stability_z;          // two-bin |log variance ratio| <= z SE
  std::optional<double> cauchy_margin_se;     // d_a - d_b > value * SE along check levels
  std::optional<double> min_excess_kurtosis;  // terminal n J_n excess kurtosis > value
  std::optional<double> slope_e2;             // |slope(e2) + H| <= value
  std::optional<double> slope_e1_slack;       // slope(e1) <= -2 alpha + value
  std::optional<double> abs_error;            // lemma2 |value - integral| <= value
};

enum class CellChoice { first, middle, last };

struct Lemma1Options {
  std::pair<int, int> entry{1, 1};
  CellChoice cell = CellChoice::last;
};

struct Lemma2Options {
  young::Coefficient g = young::Coefficient::constant(1.0);
  young::Coefficient h = young::Coefficient::polynomial({0.0, 1.0});
  std::optional<double> gamma;  // defaults to 2H - 1 for path h, 1 otherwise
};

struct DyadicOptions {
  std::size_t levels = 0;                 // finest resolution 2^levels
  std::size_t min_level = 4;
  std::vector<std::size_t> check_levels;  // levels whose d_j must decrease
};

/// A validated experiment description. Parsed from JSON; unknown keys are errors.
struct ExperimentConfig {
  ExperimentId experiment = ExperimentId::theorem1;
  double hurst = 0.0;
  double horizon = 1.0;
  young::SigmaSpec sigma;
  std::vector<std::size_t> n_grid;
  std::vector<double> t_grid{1.0};
  std::size_t replications = 0;
  std::uint64_t seed = 0;
  std::size_t oversampling = 8;
  stats::LogBase log_base = stats::LogBase::natural;
  std::optional<young::Coefficient> weight;
  double weight_holder_exponent = 1.0;
  Lemma1Options lemma1;
  Lemma2Options lemma2;
  DyadicOptions dyadic;
  Tolerances tolerances;

  /// The JSON this config was parsed from.
  nlohmann::json source;

  /// Number of intervals of the driving grid for the largest statistic resolution.
  std::size_t fine_intervals() const;
};

/// Parses and validates. Throws IngestionError on schema violations and
/// AssumptionViolation on inadmissible model parameters.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& file);

/// Normalized echo of a parsed config (defaults filled in).
nlohmann::ordered_json to_json(const ExperimentConfig& cfg);

/// SHA-256 hex digest of the canonical (key-sorted, compact) serialization.
std::string config_digest(const nlohmann::json& j);

}  // namespace crossvar::lab
