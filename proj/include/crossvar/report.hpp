#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "crossvar/moments.hpp"

namespace crossvar::lab {

struct Criterion {
  std::string id;
  std::string description;
  double value = 0.0;
  double threshold = 0.0;
  std::string comparison;  // how value relates to threshold when passing: "<", "<=", ">", ">="
  bool passed = false;
};

/// Builds a criterion, deciding pass/fail from the comparison.
Criterion make_criterion(std::string id, std::string description, double value,
                         std::string comparison, double threshold);

struct CellSummary {
  std::string statistic;
  std::string normalization;
  std::size_t n = 0;
  double t = 0.0;
  stats::SampleMoments moments;
  std::optional<double> reference;
  std::optional<double> exceedance;
  std::optional<double> ks_distance;
};

struct ReplicateRow {
  std::size_t replicate = 0;
  std::size_t n = 0;
  double t = 0.0;
  std::string statistic;
  std::string normalization;
  double value = 0.0;
};

struct ExperimentReport {
  std::string experiment;
  nlohmann::ordered_json provenance;
  nlohmann::ordered_json regime;
  std::vector<CellSummary> cells;
  nlohmann::ordered_json findings = nlohmann::ordered_json::object();
  std::vector<Criterion> criteria;
  std::vector<ReplicateRow> replicates;

  /// True iff every gated criterion passed.
  bool passed() const noexcept;
  const CellSummary* find_cell(const std::string& statistic, std::size_t n, double t) const;
};

nlohmann::ordered_json to_json(const ExperimentReport& report);

/// Columns: replicate,n,t,statistic,normalization,value
void write_replicates_csv(std::ostream& out, const ExperimentReport& report);
void write_report_files(const std::filesystem::path& dir, const ExperimentReport& report);

}  // namespace crossvar::lab
