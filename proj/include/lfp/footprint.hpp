#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "lfp/benchmark.hpp"
#include "lfp/sampling.hpp"

namespace lfp {

struct FootprintConfig {
  std::uint64_t seed = 0;
  std::size_t n_samples = 100;
  SampleMethod sampling = SampleMethod::lhs;
  std::size_t n_walks = 30;
  std::size_t walk_steps = 100;
  std::size_t trials = 9;
  std::size_t runs = 200;
  double p_d = 0.5;
  bool skip_birthday = false;
  Split split = Split::test;
  /// Budget for the static metrics; persistence spans every budget.
  int epoch = 36;
  /// Empty selects the table's first advertised metric.
  std::string metric;
  unsigned jobs = 1;
};

struct FootprintMetrics {
  double mean_fitness = 0.0;
  double std_fitness = 0.0;
  std::optional<double> ruggedness_tau;
  std::optional<std::uint64_t> cardinal_optima;
  std::optional<double> persistence_pos_q1;
  std::optional<double> persistence_neg_q1;
  std::optional<double> auc_pos_q1;
  std::optional<double> auc_neg_q1;

  friend bool operator==(const FootprintMetrics&, const FootprintMetrics&) = default;
};

inline constexpr std::size_t kFootprintAxes = 8;

/// Radar axis order.
inline constexpr std::array<std::string_view, kFootprintAxes> kFootprintAxisNames = {
    "mean_fitness",       "std_fitness", "ruggedness_tau",     "cardinal_optima",
    "persistence_pos_q1", "auc_pos_q1",  "persistence_neg_q1", "auc_neg_q1"};

struct FootprintReport {
  std::string dataset;
  int epoch = 36;
  FootprintMetrics metrics;
  /// Why a metric is null, keyed by metric name.
  std::map<std::string, std::string> null_reasons;
  nlohmann::ordered_json provenance = nlohmann::ordered_json::object();

  /// Metric values in radar axis order.
  std::array<std::optional<double>, kFootprintAxes> axis_values() const;
};

FootprintReport compute_footprint(std::shared_ptr<const FitnessTable> table,
                                  const FootprintConfig& config);

nlohmann::ordered_json footprint_to_json(const FootprintReport& report);
FootprintReport footprint_from_json(const nlohmann::json& j);

struct FootprintComparison {
  std::vector<std::string> datasets;
  /// [report][axis]; empty where the metric is null in every report.
  std::vector<std::array<std::optional<double>, kFootprintAxes>> values;
  std::vector<std::array<std::optional<double>, kFootprintAxes>> normalized;
};

/// Min-max scales each axis across the reports; an axis whose values are
/// all equal maps to 0.5.
FootprintComparison compare_footprints(std::span<const FootprintReport> reports);

nlohmann::ordered_json comparison_to_json(const FootprintComparison& comparison);
/// One row per (report, axis): dataset, axis, value, normalized.
void write_radar_csv(std::ostream& out, const FootprintComparison& comparison);

}  // namespace lfp
