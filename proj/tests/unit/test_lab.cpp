#include <doctest.h>

#include <cmath>
#include <sstream>

#include "crossvar/config.hpp"
#include "crossvar/errors.hpp"
#include "crossvar/lab.hpp"

using namespace crossvar;
using nlohmann::json;

namespace {

lab::ExperimentConfig cfg_from(const char* text) { return lab::parse_config(json::parse(text)); }

std::string dump(const lab::ExperimentReport& r) {
  std::ostringstream csv;
  lab::write_replicates_csv(csv, r);
  return lab::to_json(r).dump() + csv.str();
}

}  // namespace

TEST_SUITE("lab") {

TEST_CASE("config validation") {
  CHECK_NOTHROW(cfg_from(R"({"experiment":"theorem2","hurst":0.6,"n_grid":[64],"replications":2,"seed":1})"));
  CHECK_THROWS_AS(cfg_from(R"({"experiment":"theorem2","hurst":0.6,"n_grid":[64],"replications":2,"seed":1,"replicates":3})"),
                  IngestionError);
  CHECK_THROWS_AS(cfg_from(R"({"experiment":"theorem9","hurst":0.6,"n_grid":[64],"replications":2,"seed":1})"),
                  IngestionError);
  CHECK_THROWS_AS(cfg_from(R"({"experiment":"theorem2","hurst":0.6,"n_grid":[64],"replications":1,"seed":1})"),
                  IngestionError);
  CHECK_THROWS_AS(cfg_from(R"({"experiment":"theorem2","hurst":0.6,"n_grid":[64],"seed":1})"), IngestionError);
  // 48 does not divide the fine grid 64 * 8
  CHECK_THROWS_AS(cfg_from(R"({"experiment":"theorem2","hurst":0.6,"n_grid":[48,64],"replications":2,"seed":1})"),
                  IngestionError);
  CHECK_THROWS_AS(cfg_from(R"({"experiment":"theorem2","hurst":0.6,"n_grid":[64,32],"replications":2,"seed":1})"),
                  IngestionError);
  CHECK_THROWS_AS(cfg_from(R"({"experiment":"theorem1","hurst":0.4,"n_grid":[64],"replications":2,"seed":1})"),
                  AssumptionViolation);
  CHECK_THROWS_AS(cfg_from(R"({"experiment":"prop1","hurst":0.6,"n_grid":[64],"replications":2,"seed":1,
                               "weight":1,"weight_holder_exponent":0.5})"),
                  AssumptionViolation);
  CHECK_THROWS_AS(cfg_from(R"({"experiment":"theorem2","hurst":0.6,"n_grid":[64],"replications":2,"seed":1,
                               "tolerances":{"skewnes":0.1}})"),
                  IngestionError);
  const auto d = cfg_from(R"({"experiment":"dyadic_cauchy","hurst":0.85,"replications":2,"seed":1,
                              "dyadic":{"levels":8,"min_level":5}})");
  CHECK(d.n_grid == std::vector<std::size_t>{32, 64, 128, 256});
}

TEST_CASE("config digest") {
  CHECK(lab::config_digest(json::object()) ==
        "44136fa355b3678a1146ad16f7e8649e94fb4fc21fe77e8310c060f61caaff8a");
  const auto a = json::parse(R"({"hurst":0.6,"seed":1})");
  const auto b = json::parse(R"({"seed":1,"hurst":0.6})");
  const auto c = json::parse(R"({"seed":2,"hurst":0.6})");
  CHECK(lab::config_digest(a) == lab::config_digest(b));
  CHECK(lab::config_digest(a) != lab::config_digest(c));
}

TEST_CASE("criteria") {
  CHECK(lab::make_criterion("a", "", 1.0, "<=", 1.0).passed);
  CHECK_FALSE(lab::make_criterion("a", "", 1.0, "<", 1.0).passed);
  CHECK_FALSE(lab::make_criterion("a", "", std::nan(""), ">", 0.0).passed);
  CHECK_THROWS(lab::make_criterion("a", "", 1.0, "==", 1.0));
}

TEST_CASE("lemma2 deterministic table") {
  const auto cfg = cfg_from(R"({"experiment":"lemma2","hurst":0.6,"n_grid":[10000],"replications":2,"seed":0,
    "oversampling":1,"lemma2":{"g":{"kind":"trigonometric","function":"cos"},"h":{"kind":"polynomial","coefficients":[0,1]}},
    "tolerances":{"abs_error":0.001}})");
  const auto r = lab::run_experiment(cfg);
  CHECK(r.passed());
  REQUIRE(r.cells.size() == 1);
  CHECK(r.cells[0].moments.mean == doctest::Approx(0.841471).epsilon(1e-3));

  // g = 1 reduces to floor(nt) / n
  const auto unit = cfg_from(R"({"experiment":"lemma2","hurst":0.6,"n_grid":[7],"t_grid":[0.5],"replications":2,"seed":0,
    "oversampling":1,"lemma2":{"g":1}})");
  CHECK(lab::run_experiment(unit).cells[0].moments.mean == doctest::Approx(3.0 / 7.0));
}

TEST_CASE("lemma2 with an fBm path") {
  const auto cfg = cfg_from(R"({"experiment":"lemma2","hurst":0.7,"n_grid":[256,1024],"replications":100,"seed":4,
    "oversampling":1,"lemma2":{"g":{"kind":"polynomial","coefficients":[1,2]},"h":{"kind":"path","component":1}},
    "tolerances":{"mean_se":3}})");
  const auto r = lab::run_experiment(cfg);
  CHECK(r.passed());
  CHECK(r.findings["gamma"].get<double>() == doctest::Approx(0.4));
  CHECK(r.cells.back().reference.value() == doctest::Approx(2.0));
}

TEST_CASE("theorem1 small run") {
  const auto cfg = cfg_from(R"({"experiment":"theorem1","hurst":0.7,
    "sigma":{"s11":1,"s21":{"kind":"polynomial","coefficients":[0,1]},"s22":1},
    "n_grid":[128,512],"replications":40,"seed":3,"oversampling":4,"tolerances":{"mean_abs":0.05}})");
  const auto r = lab::run_experiment(cfg);
  CHECK(r.passed());
  CHECK(r.cells[0].reference.value() == doctest::Approx(0.5));
  CHECK(r.regime["assumption_a"]["holds"].get<bool>());

  const auto random = cfg_from(R"({"experiment":"theorem1","hurst":0.7,
    "sigma":{"s11":{"kind":"path","component":1}},"n_grid":[64],"replications":2,"seed":3})");
  CHECK_THROWS_AS(lab::run_experiment(random), AssumptionViolation);
}

TEST_CASE("unit weight reproduces theorem2") {
  const auto t2 = cfg_from(R"({"experiment":"theorem2","hurst":0.65,"n_grid":[64,256],"t_grid":[0.5,1],
    "replications":30,"seed":8,"oversampling":1})");
  const auto p1 = cfg_from(R"({"experiment":"prop1","hurst":0.65,"n_grid":[64,256],"t_grid":[0.5,1],
    "replications":30,"seed":8,"oversampling":1,"weight":1,"weight_holder_exponent":1})");
  const auto a = lab::run_experiment(t2);
  const auto b = lab::run_experiment(p1);
  REQUIRE(a.replicates.size() == b.replicates.size());
  for (std::size_t i = 0; i < a.replicates.size(); ++i) CHECK(a.replicates[i].value == b.replicates[i].value);
}

TEST_CASE("prop1 with weights") {
  const auto smooth = cfg_from(R"({"experiment":"prop1","hurst":0.65,"n_grid":[1024],"replications":600,"seed":12,
    "oversampling":1,"weight":{"kind":"polynomial","coefficients":[0,1]},"weight_holder_exponent":1,
    "tolerances":{"skewness":0.3,"excess_kurtosis":0.6,"mean_se":3}})");
  CHECK(lab::run_experiment(smooth).passed());
  const auto adapted = cfg_from(R"({"experiment":"prop1","hurst":0.65,"n_grid":[1024],"replications":600,"seed":13,
    "oversampling":1,"weight":{"kind":"path","component":1,"transform":"sin","offset":1},"weight_holder_exponent":0.6,
    "tolerances":{"mean_se":3,"stability_z":3}})");
  const auto r = lab::run_experiment(adapted);
  CHECK(r.passed());
  CHECK(r.findings.contains("two_bin"));
}

TEST_CASE("reports do not depend on the worker count") {
  const auto cfg = cfg_from(R"({"experiment":"theorem2","hurst":0.6,"n_grid":[64,128],"replications":25,"seed":5,
    "oversampling":1,"tolerances":{"skewness":1}})");
  const auto one = dump(lab::run_experiment(cfg, {1}));
  const auto three = dump(lab::run_experiment(cfg, {3}));
  CHECK(one == three);
  CHECK(one == dump(lab::run_experiment(cfg, {1})));
}

TEST_CASE("regime guards") {
  const auto low = cfg_from(R"({"experiment":"dyadic_cauchy","hurst":0.7,"replications":2,"seed":1,
    "dyadic":{"levels":6,"min_level":4}})");
  CHECK_THROWS_AS(lab::run_experiment(low), UnsupportedRegime);
  const auto offdiag = cfg_from(R"({"experiment":"theorem2","hurst":0.6,"sigma":{"s11":1,"s12":1,"s22":1},
    "n_grid":[64],"replications":2,"seed":1})");
  CHECK_THROWS_AS(lab::run_experiment(offdiag), AssumptionViolation);
  // H > 3/4 in theorem2 goes to the dyadic harness
  const auto high = cfg_from(R"({"experiment":"theorem2","hurst":0.85,"n_grid":[64],"replications":20,"seed":1,
    "oversampling":1,"dyadic":{"levels":7,"min_level":4}})");
  CHECK(lab::run_experiment(high).findings.contains("cauchy"));
}

TEST_CASE("parallel_for rethrows") {
  CHECK_THROWS_AS(lab::parallel_for(10, 3, [](std::size_t i) { if (i == 7) throw std::runtime_error("x"); }),
                  std::runtime_error);
}

}
