#include "crossvar/report.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "crossvar/path_io.hpp"

namespace crossvar::lab {
namespace {

nlohmann::ordered_json moments_json(const stats::SampleMoments& m) {
  nlohmann::ordered_json j;
  j["count"] = m.count;
  j["mean"] = m.mean;
  j["variance"] = m.variance;
  j["skewness"] = m.skewness;
  j["excess_kurtosis"] = m.excess_kurtosis;
  j["se_mean"] = m.se_mean;
  j["se_variance"] = m.se_variance;
  j["se_skewness"] = m.se_skewness;
  j["se_kurtosis"] = m.se_kurtosis;
  return j;
}

// nan/inf are not JSON; emit null for them
nlohmann::ordered_json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

}  // namespace

Criterion make_criterion(std::string id, std::string description, double value,
                         std::string comparison, double threshold) {
  bool ok = false;
  if (comparison == "<") {
    ok = value < threshold;
  } else if (comparison == "<=") {
    ok = value <= threshold;
  } else if (comparison == ">") {
    ok = value > threshold;
  } else if (comparison == ">=") {
    ok = value >= threshold;
  } else {
    throw std::invalid_argument("unknown comparison '" + comparison + "'");
  }
  if (std::isnan(value)) ok = false;
  return Criterion{std::move(id), std::move(description), value, threshold, std::move(comparison), ok};
}

bool ExperimentReport::passed() const noexcept {
  for (const auto& c : criteria) {
    if (!c.passed) return false;
  }
  return true;
}

const CellSummary* ExperimentReport::find_cell(const std::string& statistic, std::size_t n,
                                               double t) const {
  for (const auto& c : cells) {
    if (c.statistic == statistic && c.n == n && std::abs(c.t - t) < 1e-12) return &c;
  }
  return nullptr;
}

nlohmann::ordered_json to_json(const ExperimentReport& report) {
  nlohmann::ordered_json j;
  j["experiment"] = report.experiment;
  j["passed"] = report.passed();
  j["provenance"] = report.provenance;
  j["regime"] = report.regime;
  auto criteria = nlohmann::ordered_json::array();
  for (const auto& c : report.criteria) {
    nlohmann::ordered_json e;
    e["id"] = c.id;
    e["description"] = c.description;
    e["value"] = number(c.value);
    e["comparison"] = c.comparison;
    e["threshold"] = c.threshold;
    e["passed"] = c.passed;
    criteria.push_back(std::move(e));
  }
  j["criteria"] = std::move(criteria);
  j["findings"] = report.findings;
  auto cells = nlohmann::ordered_json::array();
  for (const auto& c : report.cells) {
    nlohmann::ordered_json e;
    e["statistic"] = c.statistic;
    e["normalization"] = c.normalization;
    e["n"] = c.n;
    e["t"] = c.t;
    e["moments"] = moments_json(c.moments);
    if (c.reference) e["reference"] = number(*c.reference);
    if (c.exceedance) e["exceedance"] = number(*c.exceedance);
    if (c.ks_distance) e["ks_distance"] = number(*c.ks_distance);
    cells.push_back(std::move(e));
  }
  j["cells"] = std::move(cells);
  return j;
}

void write_replicates_csv(std::ostream& out, const ExperimentReport& report) {
  out << "replicate,n,t,statistic,normalization,value\n";
  for (const auto& r : report.replicates) {
    out << r.replicate << ',' << r.n << ',' << io::format_double(r.t) << ',' << r.statistic << ','
        << r.normalization << ',' << io::format_double(r.value) << '\n';
  }
}

void write_report_files(const std::filesystem::path& dir, const ExperimentReport& report) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "report.json", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / "report.json").string());
    out << to_json(report).dump(2) << '\n';
  }
  std::ofstream out(dir / "replicates.csv", std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + (dir / "replicates.csv").string());
  write_replicates_csv(out, report);
}

}  // namespace crossvar::lab
