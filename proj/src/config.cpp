#include "crossvar/config.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "crossvar/errors.hpp"

namespace crossvar::lab {
namespace {

using nlohmann::json;

void require_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw IngestionError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw IngestionError(where + ": unknown key '" + key + "'");
  }
}

double get_number(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw IngestionError(where + ": missing '" + key + "'");
  if (!j.at(key).is_number()) throw IngestionError(where + ": '" + key + "' must be a number");
  return j.at(key).get<double>();
}

std::size_t get_count(const json& v, const std::string& what) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw IngestionError(what + " must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::optional<double> optional_number(const json& j, const char* key) {
  if (!j.contains(key)) return std::nullopt;
  if (!j.at(key).is_number()) throw IngestionError(std::string("tolerance '") + key + "' must be a number");
  return j.at(key).get<double>();
}

bool uses_sigma(ExperimentId id) {
  return id == ExperimentId::theorem1 || id == ExperimentId::theorem2 ||
         id == ExperimentId::dyadic_cauchy || id == ExperimentId::lemma1_rates;
}

Tolerances parse_tolerances(const json& j) {
  require_keys(j,
               {"mean_abs", "mean_se", "epsilon", "exceedance_monotone", "skewness",
                "excess_kurtosis", "variance_stability", "constant_match", "stability_z",
                "cauchy_margin_se", "min_excess_kurtosis", "slope_e2", "slope_e1_slack",
                "abs_error"},
               "tolerances");
  Tolerances t;
  t.mean_abs = optional_number(j, "mean_abs");
  t.mean_se = optional_number(j, "mean_se");
  t.epsilon = optional_number(j, "epsilon");
  if (j.contains("exceedance_monotone")) {
    if (!j.at("exceedance_monotone").is_boolean()) {
      throw IngestionError("tolerance 'exceedance_monotone' must be a boolean");
    }
    t.exceedance_monotone = j.at("exceedance_monotone").get<bool>();
    if (t.exceedance_monotone && !t.epsilon) {
      throw IngestionError("tolerance 'exceedance_monotone' needs 'epsilon'");
    }
  }
  t.skewness = optional_number(j, "skewness");
  t.excess_kurtosis = optional_number(j, "excess_kurtosis");
  t.variance_stability = optional_number(j, "variance_stability");
  t.constant_match = optional_number(j, "constant_match");
  t.stability_z = optional_number(j, "stability_z");
  t.cauchy_margin_se = optional_number(j, "cauchy_margin_se");
  t.min_excess_kurtosis = optional_number(j, "min_excess_kurtosis");
  t.slope_e2 = optional_number(j, "slope_e2");
  t.slope_e1_slack = optional_number(j, "slope_e1_slack");
  t.abs_error = optional_number(j, "abs_error");
  return t;
}

json tolerances_json(const Tolerances& t) {
  json j = json::object();
  auto put = [&](const char* key, const std::optional<double>& v) {
    if (v) j[key] = *v;
  };
  put("mean_abs", t.mean_abs);
  put("mean_se", t.mean_se);
  put("epsilon", t.epsilon);
  if (t.exceedance_monotone) j["exceedance_monotone"] = true;
  put("skewness", t.skewness);
  put("excess_kurtosis", t.excess_kurtosis);
  put("variance_stability", t.variance_stability);
  put("constant_match", t.constant_match);
  put("stability_z", t.stability_z);
  put("cauchy_margin_se", t.cauchy_margin_se);
  put("min_excess_kurtosis", t.min_excess_kurtosis);
  put("slope_e2", t.slope_e2);
  put("slope_e1_slack", t.slope_e1_slack);
  put("abs_error", t.abs_error);
  return j;
}

const char* cell_name(CellChoice c) {
  switch (c) {
    case CellChoice::first: return "first";
    case CellChoice::middle: return "middle";
    case CellChoice::last: return "last";
  }
  return "last";
}

}  // namespace

std::string_view to_string(ExperimentId id) noexcept {
  switch (id) {
    case ExperimentId::theorem1: return "theorem1";
    case ExperimentId::theorem2: return "theorem2";
    case ExperimentId::dyadic_cauchy: return "dyadic_cauchy";
    case ExperimentId::prop1: return "prop1";
    case ExperimentId::lemma2: return "lemma2";
    case ExperimentId::lemma1_rates: return "lemma1_rates";
  }
  return "theorem1";
}

ExperimentId experiment_from_string(std::string_view name) {
  for (ExperimentId id : {ExperimentId::theorem1, ExperimentId::theorem2, ExperimentId::dyadic_cauchy,
                          ExperimentId::prop1, ExperimentId::lemma2, ExperimentId::lemma1_rates}) {
    if (to_string(id) == name) return id;
  }
  throw IngestionError("unknown experiment id '" + std::string(name) + "'");
}

std::size_t ExperimentConfig::fine_intervals() const {
  std::size_t finest = 0;
  if (experiment == ExperimentId::dyadic_cauchy) {
    finest = std::size_t{1} << dyadic.levels;
  } else {
    finest = *std::max_element(n_grid.begin(), n_grid.end());
  }
  const double cells = static_cast<double>(finest) * horizon;
  return static_cast<std::size_t>(std::llround(cells)) * oversampling;
}

ExperimentConfig parse_config(const json& j) {
  require_keys(j,
               {"experiment", "hurst", "horizon", "sigma", "n_grid", "t_grid", "replications",
                "seed", "oversampling", "log_base", "weight", "weight_holder_exponent", "lemma1",
                "lemma2", "dyadic", "tolerances"},
               "config");
  ExperimentConfig cfg;
  cfg.source = j;
  if (!j.contains("experiment") || !j.at("experiment").is_string()) {
    throw IngestionError("config: 'experiment' (string) is required");
  }
  cfg.experiment = experiment_from_string(j.at("experiment").get<std::string>());

  cfg.hurst = get_number(j, "hurst", "config");
  const fbm::Hurst hurst(cfg.hurst);
  hurst.require_long_memory();

  if (j.contains("horizon")) cfg.horizon = get_number(j, "horizon", "config");
  if (!(cfg.horizon > 0.0)) throw IngestionError("config: horizon must be positive");

  cfg.sigma = j.contains("sigma") ? young::sigma_from_json(j.at("sigma"), hurst)
                                  : young::SigmaSpec::identity(young::default_holder_exponent(hurst));
  if (uses_sigma(cfg.experiment)) young::check_assumption_a(cfg.sigma.holder_exponent, hurst);

  if (j.contains("n_grid")) {
    if (!j.at("n_grid").is_array()) throw IngestionError("config: 'n_grid' must be an array");
    for (const auto& v : j.at("n_grid")) cfg.n_grid.push_back(get_count(v, "n_grid entry"));
  }
  if (j.contains("t_grid")) {
    if (!j.at("t_grid").is_array() || j.at("t_grid").empty()) {
      throw IngestionError("config: 't_grid' must be a non-empty array");
    }
    cfg.t_grid.clear();
    for (const auto& v : j.at("t_grid")) {
      if (!v.is_number()) throw IngestionError("config: t_grid entries must be numbers");
      const double t = v.get<double>();
      if (!(t > 0.0 && t <= cfg.horizon)) throw IngestionError("config: t_grid entries must lie in (0, T]");
      cfg.t_grid.push_back(t);
    }
  }

  if (!j.contains("replications")) throw IngestionError("config: missing 'replications'");
  cfg.replications = get_count(j.at("replications"), "replications");
  if (cfg.replications < 2) throw IngestionError("config: replications must be >= 2");
  if (!j.contains("seed")) throw IngestionError("config: missing 'seed'");
  if (!j.at("seed").is_number_unsigned()) throw IngestionError("config: seed must be a non-negative integer");
  cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("oversampling")) cfg.oversampling = get_count(j.at("oversampling"), "oversampling");
  if (cfg.oversampling < 1) throw IngestionError("config: oversampling must be >= 1");
  if (j.contains("log_base")) {
    if (!j.at("log_base").is_string()) throw IngestionError("config: log_base must be a string");
    try {
      cfg.log_base = stats::log_base_from_string(j.at("log_base").get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw IngestionError(std::string("config: ") + e.what());
    }
  }

  if (j.contains("weight")) cfg.weight = young::coefficient_from_json(j.at("weight"));
  if (j.contains("weight_holder_exponent")) {
    cfg.weight_holder_exponent = get_number(j, "weight_holder_exponent", "config");
  }

  if (j.contains("lemma1")) {
    const json& l = j.at("lemma1");
    require_keys(l, {"entry", "cell"}, "lemma1");
    if (l.contains("entry")) {
      const json& e = l.at("entry");
      if (!e.is_array() || e.size() != 2) throw IngestionError("lemma1: entry must be [i, j]");
      cfg.lemma1.entry = {e[0].get<int>(), e[1].get<int>()};
      for (int v : {cfg.lemma1.entry.first, cfg.lemma1.entry.second}) {
        if (v != 1 && v != 2) throw IngestionError("lemma1: entry indices must be 1 or 2");
      }
    }
    if (l.contains("cell")) {
      const std::string c = l.at("cell").get<std::string>();
      if (c == "first") {
        cfg.lemma1.cell = CellChoice::first;
      } else if (c == "middle") {
        cfg.lemma1.cell = CellChoice::middle;
      } else if (c == "last") {
        cfg.lemma1.cell = CellChoice::last;
      } else {
        throw IngestionError("lemma1: cell must be first, middle or last");
      }
    }
  }

  if (j.contains("lemma2")) {
    const json& l = j.at("lemma2");
    require_keys(l, {"g", "h", "gamma"}, "lemma2");
    if (l.contains("g")) cfg.lemma2.g = young::coefficient_from_json(l.at("g"));
    if (l.contains("h")) cfg.lemma2.h = young::coefficient_from_json(l.at("h"));
    if (l.contains("gamma")) cfg.lemma2.gamma = get_number(l, "gamma", "lemma2");
  }

  if (j.contains("dyadic")) {
    const json& d = j.at("dyadic");
    require_keys(d, {"levels", "min_level", "check_levels"}, "dyadic");
    if (d.contains("levels")) cfg.dyadic.levels = get_count(d.at("levels"), "dyadic.levels");
    if (d.contains("min_level")) cfg.dyadic.min_level = get_count(d.at("min_level"), "dyadic.min_level");
    if (d.contains("check_levels")) {
      for (const auto& v : d.at("check_levels")) {
        cfg.dyadic.check_levels.push_back(get_count(v, "dyadic.check_levels entry"));
      }
    }
  }

  if (j.contains("tolerances")) cfg.tolerances = parse_tolerances(j.at("tolerances"));

  // Resolution checks.
  if (cfg.experiment == ExperimentId::dyadic_cauchy) {
    if (cfg.dyadic.levels == 0 && !cfg.n_grid.empty()) {
      const std::size_t top = *std::max_element(cfg.n_grid.begin(), cfg.n_grid.end());
      if ((top & (top - 1)) != 0) throw IngestionError("dyadic: n_grid entries must be powers of two");
      while ((std::size_t{1} << cfg.dyadic.levels) < top) ++cfg.dyadic.levels;
    }
    if (cfg.dyadic.levels < cfg.dyadic.min_level + 1 || cfg.dyadic.levels > 24) {
      throw IngestionError("dyadic: need min_level < levels <= 24");
    }
    for (std::size_t l : cfg.dyadic.check_levels) {
      if (l < cfg.dyadic.min_level || l >= cfg.dyadic.levels) {
        throw IngestionError("dyadic: check_levels must lie in [min_level, levels)");
      }
    }
    cfg.n_grid.clear();
    for (std::size_t l = cfg.dyadic.min_level; l <= cfg.dyadic.levels; ++l) {
      cfg.n_grid.push_back(std::size_t{1} << l);
    }
  }
  if (cfg.n_grid.empty()) throw IngestionError("config: 'n_grid' must be a non-empty array");
  for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
    if (cfg.n_grid[i] < 2) throw IngestionError("config: n_grid entries must be >= 2");
    if (i > 0 && cfg.n_grid[i] <= cfg.n_grid[i - 1]) {
      throw IngestionError("config: n_grid must be strictly increasing");
    }
  }

  const double top_cells = static_cast<double>(cfg.n_grid.back()) * cfg.horizon;
  if (std::abs(top_cells - std::round(top_cells)) > 1e-9 * top_cells) {
    throw IngestionError("config: n T must be an integer for the largest n");
  }
  if (cfg.experiment != ExperimentId::lemma1_rates) {
    const std::size_t fine = cfg.fine_intervals();
    for (std::size_t n : cfg.n_grid) {
      const double per_cell = static_cast<double>(fine) / (static_cast<double>(n) * cfg.horizon);
      if (std::abs(per_cell - std::round(per_cell)) > 1e-9 * per_cell) {
        throw IngestionError("config: n=" + std::to_string(n) +
                             " does not divide the fine resolution " + std::to_string(fine));
      }
    }
  }

  if (cfg.experiment == ExperimentId::prop1) {
    if (!cfg.weight) throw IngestionError("prop1: 'weight' is required");
    if (!(cfg.weight_holder_exponent > 0.5)) {
      throw AssumptionViolation("prop1: declared weight exponent must exceed 1/2");
    }
  }
  if (cfg.experiment == ExperimentId::lemma1_rates && cfg.oversampling < 4) {
    throw IngestionError("lemma1_rates: oversampling must be >= 4");
  }
  if (cfg.experiment == ExperimentId::lemma2 && !cfg.lemma2.g.deterministic()) {
    throw IngestionError("lemma2: g must be deterministic");
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IngestionError("cannot open config " + file.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw IngestionError("config " + file.string() + ": " + e.what());
  }
  return parse_config(j);
}

nlohmann::ordered_json to_json(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  j["experiment"] = to_string(cfg.experiment);
  j["hurst"] = cfg.hurst;
  j["horizon"] = cfg.horizon;
  j["sigma"] = young::to_json(cfg.sigma);
  j["n_grid"] = cfg.n_grid;
  j["t_grid"] = cfg.t_grid;
  j["replications"] = cfg.replications;
  j["seed"] = cfg.seed;
  j["oversampling"] = cfg.oversampling;
  j["log_base"] = stats::to_string(cfg.log_base);
  if (cfg.weight) {
    j["weight"] = young::to_json(*cfg.weight);
    j["weight_holder_exponent"] = cfg.weight_holder_exponent;
  }
  if (cfg.experiment == ExperimentId::lemma1_rates) {
    j["lemma1"] = {{"entry", {cfg.lemma1.entry.first, cfg.lemma1.entry.second}},
                   {"cell", cell_name(cfg.lemma1.cell)}};
  }
  if (cfg.experiment == ExperimentId::lemma2) {
    nlohmann::ordered_json l;
    l["g"] = young::to_json(cfg.lemma2.g);
    l["h"] = young::to_json(cfg.lemma2.h);
    if (cfg.lemma2.gamma) l["gamma"] = *cfg.lemma2.gamma;
    j["lemma2"] = l;
  }
  if (cfg.experiment == ExperimentId::dyadic_cauchy) {
    j["dyadic"] = {{"levels", cfg.dyadic.levels},
                   {"min_level", cfg.dyadic.min_level},
                   {"check_levels", cfg.dyadic.check_levels}};
  }
  j["tolerances"] = tolerances_json(cfg.tolerances);
  return j;
}

std::string config_digest(const nlohmann::json& j) {
  const std::string text = j.dump();
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 digest failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xf]);
  }
  return out;
}

}  // namespace crossvar::lab
