#include "lfp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "lfp/error.hpp"
#include "lfp/parallel.hpp"
#include "lfp/stats.hpp"

namespace lfp {

// ------------------------------------------------------------------- FDC

FdcResult fdc(const Landscape& landscape, std::span<const Genotype> samples) {
  if (samples.empty()) throw Error(ErrorKind::data, "fdc: empty sample set");
  std::vector<double> fitness(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) fitness[i] = landscape.fitness(samples[i]);

  std::size_t best = 0;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (fitness[i] > fitness[best] || (fitness[i] == fitness[best] && samples[i] < samples[best])) {
      best = i;
    }
  }
  FdcResult result;
  result.optimum = samples[best];
  std::vector<double> distances(samples.size());
  result.pairs.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const std::size_t d = hamming(result.optimum, samples[i]);
    distances[i] = static_cast<double>(d);
    result.pairs.emplace_back(d, fitness[i]);
  }
  if (samples.size() < 2) return result;

  const bool constant_fitness =
      std::all_of(fitness.begin(), fitness.end(), [&](double f) { return f == fitness.front(); });
  if (constant_fitness) {
    result.intercept = fitness.front();
    return result;
  }
  result.pearson_r = pearson(distances, fitness);
  const LinearFit line = ols_fit(distances, fitness);
  result.slope_per_unit_distance = line.slope;
  result.intercept = line.intercept;
  return result;
}

// ------------------------------------------------------------- Ruggedness

RuggednessResult ruggedness(std::span<const Walk> walks) {
  RuggednessResult result;
  for (const auto& walk : walks) {
    if (walk.fitness_series.size() < 3) {
      throw NumericError("ruggedness: walk " + std::to_string(walk.route_id) +
                         " has fewer than 3 points");
    }
    try {
      result.per_route_rho1.push_back(autocorrelation(walk.fitness_series, 1));
    } catch (const NumericError&) {
      ++result.skipped;
    }
  }
  if (result.per_route_rho1.empty()) {
    throw NumericError("ruggedness undefined: every walk has zero fitness variance");
  }
  result.rho_mean = mean(result.per_route_rho1);
  if (result.skipped > 0) {
    result.warnings.push_back(std::to_string(result.skipped) + " zero-variance walk(s) skipped");
  }
  if (result.rho_mean == 0.0) {
    result.warnings.push_back("mean lag-1 autocorrelation is zero; tau is undefined");
    return result;
  }
  result.tau = 1.0 / result.rho_mean;
  if (result.rho_mean < 0) result.warnings.push_back("negative mean lag-1 autocorrelation");
  if (std::abs(*result.tau) > kTauWarningMagnitude) {
    result.warnings.push_back("|tau| exceeds " + std::to_string(static_cast<int>(kTauWarningMagnitude)) +
                              "; mean autocorrelation is close to zero");
  }
  return result;
}

// ------------------------------------------------------------------ BILS

BilsTrace bils(const Landscape& landscape, const Genotype& start, Direction direction) {
  if (!landscape.contains(start)) throw LookupError("bils: start is not a member of the landscape");
  BilsTrace trace;
  trace.start = start;
  Genotype current = start;
  double current_fitness = landscape.fitness(current);
  trace.start_fitness = current_fitness;
  while (true) {
    const Genotype* best = nullptr;
    double best_fitness = current_fitness;
    // Neighbors come sorted, so a strict comparison keeps the smallest
    // genotype among equally good candidates.
    const auto candidates = landscape.neighbors(current);
    for (const auto& y : candidates) {
      const double fy = landscape.fitness(y);
      if (strictly_better(fy, best_fitness, direction)) {
        best = &y;
        best_fitness = fy;
      }
    }
    if (!best) break;
    trace.improvements.push_back(std::abs(best_fitness - current_fitness));
    current = *best;
    current_fitness = best_fitness;
  }
  trace.optimum = std::move(current);
  trace.end_fitness = current_fitness;
  return trace;
}

// ------------------------------------------------------ Birthday estimate

std::uint64_t birthday_cardinal(double k, double p_d) {
  if (!(p_d > 0.0 && p_d < 1.0)) throw Error(ErrorKind::usage, "p_d must lie in (0,1)");
  const double n = (k * k) / (-2.0 * std::log1p(-p_d));
  return static_cast<std::uint64_t>(std::floor(n));
}

BirthdayEstimate estimate_optima_birthday(const Landscape& landscape, const BirthdayConfig& config) {
  if (config.trials < 1) throw Error(ErrorKind::usage, "birthday: need at least 1 trial");
  if (config.runs_per_trial < 2) throw Error(ErrorKind::usage, "birthday: need at least 2 runs per trial");
  if (!(config.p_d > 0.0 && config.p_d < 1.0)) throw Error(ErrorKind::usage, "birthday: p_d must lie in (0,1)");

  BirthdayEstimate estimate;
  estimate.p_d = config.p_d;
  std::vector<double> ks;
  for (std::size_t t = 0; t < config.trials; ++t) {
    const SampleSet starts =
        sample_uniform(landscape, config.runs_per_trial, derive_seed(config.seed, t));
    std::vector<BilsTrace> traces(starts.genotypes.size());
    parallel_for(traces.size(), config.jobs, [&](std::size_t r) {
      traces[r] = bils(landscape, starts.genotypes[r], config.direction);
    });

    BirthdayTrial trial;
    double steps = 0.0, improvement = 0.0;
    std::unordered_set<Genotype, GenotypeHash> seen;
    for (const auto& trace : traces) {
      steps += static_cast<double>(trace.steps());
      improvement += 100.0 * std::abs(trace.end_fitness - trace.start_fitness);
      if (!trial.first_repeat_k && !seen.insert(trace.optimum).second) {
        trial.first_repeat_k = seen.size();
      }
      trial.endpoints.push_back(trace.optimum);
    }
    const double runs = static_cast<double>(traces.size());
    trial.avg_step = steps / runs;
    trial.avg_improvement_pct = improvement / runs;
    if (trial.first_repeat_k) {
      trial.cardinal = birthday_cardinal(static_cast<double>(*trial.first_repeat_k), config.p_d);
      ks.push_back(static_cast<double>(*trial.first_repeat_k));
    } else {
      ++estimate.failed_trials;
    }
    estimate.avg_step += trial.avg_step;
    estimate.avg_improvement_pct += trial.avg_improvement_pct;
    estimate.trials.push_back(std::move(trial));
  }
  estimate.avg_step /= static_cast<double>(config.trials);
  estimate.avg_improvement_pct /= static_cast<double>(config.trials);
  if (ks.empty()) {
    throw NumericError("birthday estimate: no duplicate optimum in any of " +
                       std::to_string(config.trials) + " trials; increase runs per trial (M=" +
                       std::to_string(config.runs_per_trial) + ")");
  }
  estimate.k_mean = mean(ks);
  estimate.cardinal_raw = birthday_cardinal(estimate.k_mean, config.p_d);
  estimate.cardinal_estimate = std::max<std::uint64_t>(1, estimate.cardinal_raw);
  return estimate;
}

void write_birthday_csv(std::ostream& out, const BirthdayEstimate& estimate) {
  const auto old_precision = out.precision(17);
  out << "trial,avg_step,avg_improvement_pct,first_repeat_k,cardinal\n";
  for (std::size_t t = 0; t < estimate.trials.size(); ++t) {
    const auto& trial = estimate.trials[t];
    out << (t + 1) << ',' << trial.avg_step << ',' << trial.avg_improvement_pct << ',';
    if (trial.first_repeat_k) out << *trial.first_repeat_k;
    out << ',';
    if (trial.cardinal) out << *trial.cardinal;
    out << '\n';
  }
  out << "summary," << estimate.avg_step << ',' << estimate.avg_improvement_pct << ','
      << estimate.k_mean << ',' << estimate.cardinal_estimate << '\n';
  out.precision(old_precision);
}

// ----------------------------------------------------------- Proxy optima

std::size_t count_proxy_optima(std::span<const Genotype> samples, std::span<const double> fitness,
                               std::size_t n_nei, Direction direction) {
  if (samples.size() != fitness.size()) throw Error(ErrorKind::data, "proxy optima: size mismatch");
  if (n_nei == 0 || n_nei >= samples.size()) {
    throw Error(ErrorKind::usage, "proxy optima: n_nei must lie in [1, " +
                                      std::to_string(samples.size()) + ")");
  }
  std::size_t count = 0;
  std::vector<std::size_t> order;
  std::vector<std::size_t> distance(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    order.clear();
    for (std::size_t j = 0; j < samples.size(); ++j) {
      if (j == i) continue;
      distance[j] = hamming(samples[i], samples[j]);
      order.push_back(j);
    }
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_nei), order.end(),
                      [&](std::size_t a, std::size_t b) {
                        if (distance[a] != distance[b]) return distance[a] < distance[b];
                        return samples[a] < samples[b];
                      });
    const bool dominates = std::all_of(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_nei),
                                       [&](std::size_t j) {
                                         return strictly_better(fitness[i], fitness[j], direction);
                                       });
    if (dominates) ++count;
  }
  return count;
}

std::uint64_t transfer_optima_estimate(std::uint64_t proxy_target, std::uint64_t proxy_reference,
                                       std::uint64_t reference_cardinal) {
  if (proxy_reference == 0) throw NumericError("transfer estimate: reference proxy count is zero");
  // Integer arithmetic keeps the floor exact.
  const unsigned __int128 scaled = static_cast<unsigned __int128>(proxy_target) * reference_cardinal;
  return static_cast<std::uint64_t>(scaled / proxy_reference);
}

// ------------------------------------------------------------ Persistence

std::string_view to_string(RankSide side) { return side == RankSide::top ? "positive" : "negative"; }

std::vector<bool> rank_set(std::span<const double> values, RankSide side, int n_percent) {
  if (n_percent < 1 || n_percent > 100) throw Error(ErrorKind::usage, "rank N must lie in [1,100]");
  std::vector<bool> in(values.size(), false);
  if (values.empty()) return in;
  std::vector<double> sorted(values.begin(), values.end());
  if (side == RankSide::top) {
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
  } else {
    std::sort(sorted.begin(), sorted.end());
  }
  const std::size_t k = std::max<std::size_t>(
      1, (static_cast<std::size_t>(n_percent) * values.size() + 99) / 100);
  const double threshold = sorted[k - 1];
  for (std::size_t i = 0; i < values.size(); ++i) {
    in[i] = side == RankSide::top ? values[i] >= threshold : values[i] <= threshold;
  }
  return in;
}

double persistence_from_matrix(const std::vector<std::vector<double>>& values_by_epoch,
                               RankSide side, int n_percent) {
  if (values_by_epoch.empty()) throw Error(ErrorKind::usage, "persistence: empty horizon");
  std::vector<bool> survivors = rank_set(values_by_epoch.front(), side, n_percent);
  const auto initial = static_cast<std::size_t>(std::count(survivors.begin(), survivors.end(), true));
  if (initial == 0) throw NumericError("persistence undefined: empty initial rank set");
  for (std::size_t e = 1; e < values_by_epoch.size(); ++e) {
    const auto set = rank_set(values_by_epoch[e], side, n_percent);
    for (std::size_t s = 0; s < survivors.size(); ++s) survivors[s] = survivors[s] && set[s];
  }
  const auto kept = static_cast<std::size_t>(std::count(survivors.begin(), survivors.end(), true));
  return static_cast<double>(kept) / static_cast<double>(initial);
}

std::vector<std::vector<double>> persistence_matrix(const FitnessTable& table,
                                                    std::span<const Genotype> samples, Split split,
                                                    const std::string& metric,
                                                    std::span<const int> horizon) {
  std::vector<int> epochs(horizon.begin(), horizon.end());
  if (epochs.empty()) epochs = table.epochs();
  if (epochs.size() < 2) {
    throw Error(ErrorKind::data, "persistence needs at least 2 epoch budgets, table '" +
                                     table.dataset_name() + "' has " + std::to_string(epochs.size()));
  }
  if (samples.empty()) throw Error(ErrorKind::data, "persistence: empty sample set");
  std::vector<std::vector<double>> matrix(epochs.size(), std::vector<double>(samples.size()));
  for (std::size_t e = 0; e < epochs.size(); ++e) {
    const std::size_t column = table.column({split, epochs[e], metric});
    for (std::size_t s = 0; s < samples.size(); ++s) matrix[e][s] = table.fitness(samples[s], column);
  }
  return matrix;
}

double persistence(const FitnessTable& table, std::span<const Genotype> samples, RankSide side,
                   int n_percent, Split split, const std::string& metric,
                   std::span<const int> horizon) {
  return persistence_from_matrix(persistence_matrix(table, samples, split, metric, horizon), side,
                                 n_percent);
}

PersistenceCurve persistence_curve_from_matrix(const std::vector<std::vector<double>>& values_by_epoch,
                                               RankSide side, std::vector<int> horizon) {
  PersistenceCurve curve;
  curve.side = side;
  curve.horizon = std::move(horizon);
  for (int n = 1; n <= 100; ++n) {
    try {
      curve.values[n - 1] = persistence_from_matrix(values_by_epoch, side, n);
    } catch (const NumericError&) {
      curve.values[n - 1].reset();
    }
  }
  double area = 0.0;
  for (int n = 1; n < kQ1Rank; ++n) {
    const auto& a = curve.values[n - 1];
    const auto& b = curve.values[n];
    if (!a || !b) return curve;
    area += 0.5 * (*a + *b);
  }
  curve.auc_q1 = area / static_cast<double>(kQ1Rank - 1);
  return curve;
}

PersistenceCurve persistence_curve(const FitnessTable& table, std::span<const Genotype> samples,
                                   RankSide side, Split split, const std::string& metric,
                                   std::span<const int> horizon) {
  std::vector<int> epochs(horizon.begin(), horizon.end());
  if (epochs.empty()) epochs = table.epochs();
  return persistence_curve_from_matrix(persistence_matrix(table, samples, split, metric, epochs), side,
                                       std::move(epochs));
}

void write_persistence_csv(std::ostream& out, std::span<const PersistenceCurve> curves) {
  const auto old_precision = out.precision(17);
  out << "N";
  for (const auto& c : curves) {
    out << ",pi_" << to_string(c.side) << '_';
    for (std::size_t i = 0; i < c.horizon.size(); ++i) out << (i ? "-" : "") << c.horizon[i];
  }
  out << '\n';
  for (int n = 1; n <= 100; ++n) {
    out << n;
    for (const auto& c : curves) {
      out << ',';
      if (c.values[n - 1]) out << *c.values[n - 1];
    }
    out << '\n';
  }
  out.precision(old_precision);
}

// ------------------------------------------------------ Sample-size study

SampleSizeStudy sample_size_study(const Landscape& landscape, std::span<const std::size_t> sizes,
                                  std::uint64_t seed, std::size_t bins, SampleMethod method) {
  if (sizes.empty()) throw Error(ErrorKind::usage, "sample-size study needs at least one size");
  SampleSizeStudy study;
  study.sizes.assign(sizes.begin(), sizes.end());

  std::vector<std::vector<double>> values;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const SampleSet set = draw_samples(landscape, method, sizes[i], derive_seed(seed, i));
    std::vector<double> f(set.genotypes.size());
    for (std::size_t j = 0; j < f.size(); ++j) f[j] = landscape.fitness(set.genotypes[j]);
    values.push_back(std::move(f));
  }

  std::vector<double> reference;
  try {
    for (const auto& g : landscape.enumerate(kDefaultEnumerationCap)) reference.push_back(landscape.fitness(g));
  } catch (const CapacityError&) {
    reference = *std::max_element(values.begin(), values.end(),
                                  [](const auto& a, const auto& b) { return a.size() < b.size(); });
  }
  const auto [lo, hi] = std::minmax_element(reference.begin(), reference.end());
  DensityOptions options;
  options.bins = bins;
  if (*hi > *lo) options.range = std::make_pair(*lo, *hi);
  else options.range = std::make_pair(*lo - 0.5, *hi + 0.5);

  for (const auto& v : values) study.curves.push_back(empirical_density(v, options));
  for (std::size_t i = 0; i + 1 < study.curves.size(); ++i) {
    study.l1.push_back(density_l1(study.curves[i], study.curves[i + 1]));
  }
  return study;
}

}  // namespace lfp
