#include "lfp/footprint.hpp"

#include <algorithm>

#include "lfp/analysis.hpp"
#include "lfp/error.hpp"
#include "lfp/stats.hpp"

namespace lfp {

namespace {

// Independent generator streams of one footprint run.
enum Stream : std::uint64_t { kSampling = 1, kWalks = 2, kBirthday = 3 };

template <class T>
nlohmann::ordered_json nullable(const std::optional<T>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

std::array<std::optional<double>, kFootprintAxes> FootprintReport::axis_values() const {
  const auto& m = metrics;
  std::optional<double> cardinal;
  if (m.cardinal_optima) cardinal = static_cast<double>(*m.cardinal_optima);
  return {m.mean_fitness,       m.std_fitness, m.ruggedness_tau,     cardinal,
          m.persistence_pos_q1, m.auc_pos_q1,  m.persistence_neg_q1, m.auc_neg_q1};
}

FootprintReport compute_footprint(std::shared_ptr<const FitnessTable> table,
                                  const FootprintConfig& config) {
  FitnessQuery query{config.split, config.epoch, config.metric};
  if (query.metric.empty()) query.metric = table->metrics().front();
  const TabularLandscape landscape(table, query);

  FootprintReport report;
  report.dataset = table->dataset_name();
  report.epoch = config.epoch;

  auto& prov = report.provenance;
  prov["split"] = std::string(to_string(query.split));
  prov["metric"] = query.metric;
  prov["table_size"] = table->size();
  prov["epochs_available"] = table->epochs();
  prov["master_seed"] = config.seed;
  prov["seeds"] = {{"sampling", derive_seed(config.seed, kSampling)},
                   {"walks", derive_seed(config.seed, kWalks)},
                   {"birthday", derive_seed(config.seed, kBirthday)}};

  // Samples for the static and persistence metrics.
  const std::size_t wanted = std::min<std::size_t>(config.n_samples, table->size());
  SampleSet samples;
  nlohmann::ordered_json sampling_prov;
  sampling_prov["method_requested"] = std::string(to_string(config.sampling));
  sampling_prov["size_requested"] = config.n_samples;
  try {
    samples = draw_samples(landscape, config.sampling, wanted, derive_seed(config.seed, kSampling));
  } catch (const SamplingError& e) {
    if (config.sampling != SampleMethod::lhs) throw;
    sampling_prov["fallback"] = std::string("uniform: ") + e.what();
    samples = sample_uniform(landscape, wanted, derive_seed(config.seed, kSampling));
  }
  sampling_prov["method_used"] = std::string(to_string(samples.method));
  sampling_prov["size_used"] = samples.genotypes.size();
  prov["sampling"] = std::move(sampling_prov);

  std::vector<double> fitness(samples.genotypes.size());
  for (std::size_t i = 0; i < fitness.size(); ++i) fitness[i] = landscape.fitness(samples.genotypes[i]);
  report.metrics.mean_fitness = mean(fitness);
  report.metrics.std_fitness = stddev(fitness);

  // Ruggedness.
  nlohmann::ordered_json walk_prov;
  walk_prov["routes"] = config.n_walks;
  walk_prov["steps"] = config.walk_steps;
  try {
    const auto walks = random_walks(landscape, config.n_walks, config.walk_steps,
                                    derive_seed(config.seed, kWalks), config.jobs);
    std::vector<Walk> usable;
    std::size_t stuck = 0;
    for (const auto& w : walks) {
      if (w.stuck) ++stuck;
      if (w.fitness_series.size() >= 3) usable.push_back(w);
    }
    walk_prov["stuck"] = stuck;
    walk_prov["too_short"] = walks.size() - usable.size();
    const RuggednessResult rug = ruggedness(usable);
    report.metrics.ruggedness_tau = rug.tau;
    walk_prov["rho_mean"] = rug.rho_mean;
    walk_prov["zero_variance_skipped"] = rug.skipped;
    walk_prov["warnings"] = rug.warnings;
    if (!rug.tau) report.null_reasons["ruggedness_tau"] = "mean lag-1 autocorrelation is zero";
  } catch (const Error& e) {
    report.null_reasons["ruggedness_tau"] = e.what();
  }
  prov["walks"] = std::move(walk_prov);

  // Cardinal of optima.
  nlohmann::ordered_json birthday_prov;
  birthday_prov["trials"] = config.trials;
  birthday_prov["runs_per_trial"] = config.runs;
  birthday_prov["p_d"] = config.p_d;
  if (config.skip_birthday) {
    report.null_reasons["cardinal_optima"] = "skipped by configuration";
  } else {
    try {
      BirthdayConfig bc;
      bc.trials = config.trials;
      bc.runs_per_trial = config.runs;
      bc.p_d = config.p_d;
      bc.seed = derive_seed(config.seed, kBirthday);
      bc.direction = Direction::maximize;
      bc.jobs = config.jobs;
      const BirthdayEstimate est = estimate_optima_birthday(landscape, bc);
      report.metrics.cardinal_optima = est.cardinal_estimate;
      birthday_prov["k_mean"] = est.k_mean;
      birthday_prov["failed_trials"] = est.failed_trials;
      birthday_prov["avg_step"] = est.avg_step;
      birthday_prov["avg_improvement_pct"] = est.avg_improvement_pct;
    } catch (const Error& e) {
      report.null_reasons["cardinal_optima"] = e.what();
    }
  }
  prov["birthday"] = std::move(birthday_prov);

  // Persistence over every budget.
  try {
    const auto matrix = persistence_matrix(*table, samples.genotypes, query.split, query.metric);
    const auto pos = persistence_curve_from_matrix(matrix, RankSide::top, table->epochs());
    const auto neg = persistence_curve_from_matrix(matrix, RankSide::bottom, table->epochs());
    report.metrics.persistence_pos_q1 = pos.values[kQ1Rank - 1];
    report.metrics.persistence_neg_q1 = neg.values[kQ1Rank - 1];
    report.metrics.auc_pos_q1 = pos.auc_q1;
    report.metrics.auc_neg_q1 = neg.auc_q1;
    prov["persistence"] = {{"horizon", table->epochs()}, {"samples", samples.genotypes.size()}};
  } catch (const Error& e) {
    for (const char* name : {"persistence_pos_q1", "persistence_neg_q1", "auc_pos_q1", "auc_neg_q1"}) {
      report.null_reasons[name] = e.what();
    }
  }
  return report;
}

nlohmann::ordered_json footprint_to_json(const FootprintReport& report) {
  const auto& m = report.metrics;
  nlohmann::ordered_json metrics;
  metrics["mean_fitness"] = m.mean_fitness;
  metrics["std_fitness"] = m.std_fitness;
  metrics["ruggedness_tau"] = nullable(m.ruggedness_tau);
  metrics["cardinal_optima"] = nullable(m.cardinal_optima);
  metrics["persistence_pos_q1"] = nullable(m.persistence_pos_q1);
  metrics["persistence_neg_q1"] = nullable(m.persistence_neg_q1);
  metrics["auc_pos_q1"] = nullable(m.auc_pos_q1);
  metrics["auc_neg_q1"] = nullable(m.auc_neg_q1);

  nlohmann::ordered_json j;
  j["dataset"] = report.dataset;
  j["epoch"] = report.epoch;
  j["metrics"] = std::move(metrics);
  nlohmann::ordered_json prov = report.provenance;
  if (!report.null_reasons.empty()) {
    nlohmann::ordered_json reasons = nlohmann::ordered_json::object();
    for (const auto& [k, v] : report.null_reasons) reasons[k] = v;
    prov["null_reasons"] = std::move(reasons);
  }
  j["provenance"] = std::move(prov);
  return j;
}

FootprintReport footprint_from_json(const nlohmann::json& j) {
  try {
    FootprintReport r;
    r.dataset = j.at("dataset").get<std::string>();
    r.epoch = j.at("epoch").get<int>();
    const auto& m = j.at("metrics");
    if (m.size() != kFootprintAxes) {
      throw Error(ErrorKind::data, "footprint '" + r.dataset + "' must carry exactly 8 metrics");
    }
    auto opt = [&](const char* key) -> std::optional<double> {
      const auto& v = m.at(key);
      if (v.is_null()) return std::nullopt;
      return v.get<double>();
    };
    r.metrics.mean_fitness = m.at("mean_fitness").get<double>();
    r.metrics.std_fitness = m.at("std_fitness").get<double>();
    r.metrics.ruggedness_tau = opt("ruggedness_tau");
    if (!m.at("cardinal_optima").is_null()) {
      r.metrics.cardinal_optima = m.at("cardinal_optima").get<std::uint64_t>();
    }
    r.metrics.persistence_pos_q1 = opt("persistence_pos_q1");
    r.metrics.persistence_neg_q1 = opt("persistence_neg_q1");
    r.metrics.auc_pos_q1 = opt("auc_pos_q1");
    r.metrics.auc_neg_q1 = opt("auc_neg_q1");
    if (j.contains("provenance")) {
      r.provenance = nlohmann::ordered_json::parse(j.at("provenance").dump());
      if (r.provenance.contains("null_reasons")) {
        for (const auto& [k, v] : r.provenance.at("null_reasons").items()) {
          r.null_reasons[k] = v.get<std::string>();
        }
        r.provenance.erase("null_reasons");
      }
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("footprint JSON: ") + e.what());
  }
}

FootprintComparison compare_footprints(std::span<const FootprintReport> reports) {
  if (reports.size() < 2) throw Error(ErrorKind::usage, "comparison needs at least 2 footprints");
  FootprintComparison cmp;
  for (const auto& r : reports) {
    cmp.datasets.push_back(r.dataset);
    cmp.values.push_back(r.axis_values());
  }
  cmp.normalized.assign(reports.size(), {});
  for (std::size_t a = 0; a < kFootprintAxes; ++a) {
    const bool present = cmp.values.front()[a].has_value();
    for (std::size_t r = 1; r < reports.size(); ++r) {
      if (cmp.values[r][a].has_value() != present) {
        throw Error(ErrorKind::data, "metric sets differ: '" + std::string(kFootprintAxisNames[a]) +
                                         "' is null in some footprints only");
      }
    }
    if (!present) continue;
    double lo = *cmp.values.front()[a], hi = lo;
    for (const auto& v : cmp.values) {
      lo = std::min(lo, *v[a]);
      hi = std::max(hi, *v[a]);
    }
    for (std::size_t r = 0; r < reports.size(); ++r) {
      cmp.normalized[r][a] = hi > lo ? (*cmp.values[r][a] - lo) / (hi - lo) : 0.5;
    }
  }
  return cmp;
}

nlohmann::ordered_json comparison_to_json(const FootprintComparison& cmp) {
  nlohmann::ordered_json j;
  j["axes"] = kFootprintAxisNames;
  nlohmann::ordered_json reports = nlohmann::ordered_json::array();
  for (std::size_t r = 0; r < cmp.datasets.size(); ++r) {
    nlohmann::ordered_json values = nlohmann::ordered_json::array();
    nlohmann::ordered_json normalized = nlohmann::ordered_json::array();
    for (std::size_t a = 0; a < kFootprintAxes; ++a) {
      values.push_back(nullable(cmp.values[r][a]));
      normalized.push_back(nullable(cmp.normalized[r][a]));
    }
    reports.push_back({{"dataset", cmp.datasets[r]}, {"values", values}, {"normalized", normalized}});
  }
  j["reports"] = std::move(reports);
  return j;
}

void write_radar_csv(std::ostream& out, const FootprintComparison& cmp) {
  const auto old_precision = out.precision(17);
  out << "dataset,axis,value,normalized\n";
  for (std::size_t r = 0; r < cmp.datasets.size(); ++r) {
    for (std::size_t a = 0; a < kFootprintAxes; ++a) {
      out << cmp.datasets[r] << ',' << kFootprintAxisNames[a] << ',';
      if (cmp.values[r][a]) out << *cmp.values[r][a];
      out << ',';
      if (cmp.normalized[r][a]) out << *cmp.normalized[r][a];
      out << '\n';
    }
  }
  out.precision(old_precision);
}

}  // namespace lfp
