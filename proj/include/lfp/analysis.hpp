#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "lfp/benchmark.hpp"
#include "lfp/sampling.hpp"
#include "lfp/stats.hpp"

namespace lfp {

// ------------------------------------------------------------------- FDC

struct FdcResult {
  Genotype optimum;
  std::vector<std::pair<std::size_t, double>> pairs;  // (distance to optimum, fitness)
  /// Empty when fitness is constant over the samples.
  std::optional<double> pearson_r;
  double slope_per_unit_distance = 0.0;
  double intercept = 0.0;
};

/// Distances are measured to the best sample (ties: smallest genotype).
FdcResult fdc(const Landscape& landscape, std::span<const Genotype> samples);

// ------------------------------------------------------------- Ruggedness

inline constexpr double kTauWarningMagnitude = 100.0;

struct RuggednessResult {
  std::vector<double> per_route_rho1;
  double rho_mean = 0.0;
  /// 1 / rho_mean; empty when rho_mean is exactly zero.
  std::optional<double> tau;
  std::size_t skipped = 0;  // zero-variance walks
  std::vector<std::string> warnings;
};

RuggednessResult ruggedness(std::span<const Walk> walks);

// ------------------------------------------------------------------ BILS

struct BilsTrace {
  Genotype start;
  Genotype optimum;
  double start_fitness = 0.0;
  double end_fitness = 0.0;
  /// Fitness gain of each move, measured in the search direction (> 0).
  std::vector<double> improvements;

  std::size_t steps() const { return improvements.size(); }
};

/// Best-improvement local search: scan the whole neighborhood and move to
/// the best strictly improving neighbor (ties: smallest genotype) until none
/// improves.
BilsTrace bils(const Landscape& landscape, const Genotype& start, Direction direction);

// ------------------------------------------------------ Birthday estimate

/// floor(k^2 / (-2 ln(1 - p_d))).
std::uint64_t birthday_cardinal(double k, double p_d);

struct BirthdayTrial {
  double avg_step = 0.0;
  /// Mean of 100 * (end - start) fitness over the trial's runs.
  double avg_improvement_pct = 0.0;
  /// Distinct optima collected before the first duplicate; empty on failure.
  std::optional<std::size_t> first_repeat_k;
  std::optional<std::uint64_t> cardinal;
  /// BILS endpoints in run order.
  std::vector<Genotype> endpoints;

  bool failed() const { return !first_repeat_k.has_value(); }
};

struct BirthdayConfig {
  std::size_t trials = 9;
  std::size_t runs_per_trial = 200;
  double p_d = 0.5;
  std::uint64_t seed = 0;
  Direction direction = Direction::maximize;
  unsigned jobs = 1;
};

struct BirthdayEstimate {
  std::vector<BirthdayTrial> trials;
  double p_d = 0.5;
  double k_mean = 0.0;
  double avg_step = 0.0;
  double avg_improvement_pct = 0.0;
  std::uint64_t cardinal_raw = 0;
  /// cardinal_raw clamped below at 1: a landscape has at least one optimum.
  std::uint64_t cardinal_estimate = 1;
  std::size_t failed_trials = 0;
};

BirthdayEstimate estimate_optima_birthday(const Landscape& landscape, const BirthdayConfig& config);

/// Columns trial, avg_step, avg_improvement_pct, first_repeat_k, cardinal and
/// a closing summary row.
void write_birthday_csv(std::ostream& out, const BirthdayEstimate& estimate);

// ----------------------------------------------------------- Proxy optima

/// Samples strictly better than each of their n_nei Hamming-nearest samples
/// (distance ties broken by smaller genotype).
std::size_t count_proxy_optima(std::span<const Genotype> samples, std::span<const double> fitness,
                               std::size_t n_nei, Direction direction = Direction::maximize);

/// floor(proxy_target / proxy_reference * reference_cardinal).
std::uint64_t transfer_optima_estimate(std::uint64_t proxy_target, std::uint64_t proxy_reference,
                                       std::uint64_t reference_cardinal);

// ------------------------------------------------------------ Persistence

enum class RankSide : std::uint8_t { top, bottom };  // positive / negative persistence

std::string_view to_string(RankSide side);

/// Members of the Top-N% (or Bottom-N%) set: values at least as good as the
/// k-th best with k = ceil(N * size / 100), ties included.
std::vector<bool> rank_set(std::span<const double> values, RankSide side, int n_percent);

/// values_by_epoch[e][s] is sample s at the e-th budget of the horizon.
/// Returns |set at every budget| / |set at the first budget|.
double persistence_from_matrix(const std::vector<std::vector<double>>& values_by_epoch,
                               RankSide side, int n_percent);

/// Fitness of every sample at each horizon budget (all table budgets when
/// horizon is empty).
std::vector<std::vector<double>> persistence_matrix(const FitnessTable& table,
                                                    std::span<const Genotype> samples, Split split,
                                                    const std::string& metric,
                                                    std::span<const int> horizon = {});

double persistence(const FitnessTable& table, std::span<const Genotype> samples, RankSide side,
                   int n_percent, Split split, const std::string& metric,
                   std::span<const int> horizon = {});

inline constexpr int kQ1Rank = 25;

struct PersistenceCurve {
  RankSide side = RankSide::top;
  std::vector<int> horizon;
  /// values[N - 1] = Pi(N); empty where Pi is undefined.
  std::array<std::optional<double>, 100> values{};
  /// Trapezoid integral of Pi over N in [1, 25], divided by 24.
  std::optional<double> auc_q1;
};

PersistenceCurve persistence_curve_from_matrix(const std::vector<std::vector<double>>& values_by_epoch,
                                               RankSide side, std::vector<int> horizon);
PersistenceCurve persistence_curve(const FitnessTable& table, std::span<const Genotype> samples,
                                   RankSide side, Split split, const std::string& metric,
                                   std::span<const int> horizon = {});

/// One row per N with a Pi column for each growing horizon t0..t_h, h >= 1.
void write_persistence_csv(std::ostream& out, std::span<const PersistenceCurve> curves);

// ------------------------------------------------------ Sample-size study

struct SampleSizeStudy {
  std::vector<std::size_t> sizes;
  /// Histograms over one shared set of bins.
  std::vector<DensityCurve> curves;
  /// l1[i]: L1 distance between the curves of sizes[i] and sizes[i + 1].
  std::vector<double> l1;
};

/// Density of fitness at growing sample sizes. Each size gets its own draw;
/// the bins span the fitness range of the whole space when it can be
/// enumerated, otherwise that of the largest sample.
SampleSizeStudy sample_size_study(const Landscape& landscape, std::span<const std::size_t> sizes,
                                  std::uint64_t seed, std::size_t bins = 20,
                                  SampleMethod method = SampleMethod::uniform);

}  // namespace lfp
