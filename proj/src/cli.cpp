#include "lfp/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "lfp/analysis.hpp"
#include "lfp/benchmark.hpp"
#include "lfp/error.hpp"
#include "lfp/footprint.hpp"
#include "lfp/sampling.hpp"
#include "lfp/stats.hpp"

namespace lfp::cli {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

struct Options {
  std::vector<std::string> inputs;
  std::string dataset;
  std::string split = "test";
  int epoch = 36;
  std::vector<int> epochs{36};
  std::string metric;
  std::uint64_t seed = 0;
  std::size_t samples = 100;
  std::string sampling = "lhs";
  std::size_t walks = 30;
  std::size_t steps = 100;
  std::size_t smooth = 1;
  std::size_t trials = 9;
  std::size_t runs = 200;
  double pd = 0.5;
  std::string direction = "max";
  std::vector<std::string> families{"beta", "weibull", "lognormal"};
  std::size_t bins = 20;
  bool kde = false;
  int nk_n = 10;
  int nk_k = 2;
  double noise = 0.0;
  std::string nk_metric = "overall_accuracy";
  std::vector<std::size_t> sizes{100, 200, 500, 1000};
  std::string out = ".";
  bool force = false;
  unsigned jobs = 1;
  bool skip_birthday = false;
};

/// Everything a run needs besides the parsed options.
class Context {
 public:
  Context(std::string command, const Options& opt, bool seeded)
      : command_(std::move(command)), opt_(opt), seeded_(seeded) {}

  const Options& opt() const { return opt_; }
  const std::string& command() const { return command_; }

  std::uint64_t seed() const {
    if (!seeded_) {
      throw Error(ErrorKind::usage, "'" + command_ + "' is stochastic: pass --seed or set LFP_SEED");
    }
    return opt_.seed;
  }

  ordered_json resolved_config() const {
    ordered_json j;
    j["command"] = command_;
    j["inputs"] = opt_.inputs;
    if (!opt_.dataset.empty()) j["dataset"] = opt_.dataset;
    j["split"] = opt_.split;
    j["epoch"] = opt_.epoch;
    j["metric"] = opt_.metric;
    j["seed"] = seeded_ ? ordered_json(opt_.seed) : ordered_json(nullptr);
    j["samples"] = opt_.samples;
    j["sampling"] = opt_.sampling;
    j["walks"] = opt_.walks;
    j["steps"] = opt_.steps;
    j["smooth"] = opt_.smooth;
    j["trials"] = opt_.trials;
    j["runs"] = opt_.runs;
    j["pd"] = opt_.pd;
    j["direction"] = opt_.direction;
    j["families"] = opt_.families;
    j["bins"] = opt_.bins;
    j["kde"] = opt_.kde;
    j["skip_birthday"] = opt_.skip_birthday;
    if (command_ == "gen-nk") {
      j["n"] = opt_.nk_n;
      j["k"] = opt_.nk_k;
      j["epochs"] = opt_.epochs;
      j["noise"] = opt_.noise;
    }
    if (command_ == "sample-size-study") j["sizes"] = opt_.sizes;
    return j;
  }

  /// Opens an artifact for writing, refusing to replace files without --force.
  std::ofstream open(const std::string& name) {
    const fs::path dir(opt_.out);
    fs::create_directories(dir);
    const fs::path path = dir / name;
    if (fs::exists(path) && !opt_.force) {
      throw Error(ErrorKind::usage, "refusing to overwrite '" + path.string() + "' (use --force)");
    }
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::data, "cannot write '" + path.string() + "'");
    artifacts_.push_back(path.string());
    return out;
  }

  /// CSV artifacts carry the resolved config on a leading comment line.
  std::ofstream open_csv(const std::string& name) {
    auto out = open(name);
    out << "# config: " << resolved_config().dump() << '\n';
    return out;
  }

  void write_json(const std::string& name, ordered_json body) {
    body["config"] = resolved_config();
    auto out = open(name);
    out << body.dump(2) << '\n';
  }

  const std::vector<std::string>& artifacts() const { return artifacts_; }

 private:
  std::string command_;
  const Options& opt_;
  bool seeded_;
  std::vector<std::string> artifacts_;
};

std::shared_ptr<const FitnessTable> load_input(const Options& opt) {
  if (opt.inputs.empty()) throw Error(ErrorKind::usage, "--input is required");
  return std::make_shared<const FitnessTable>(load_table(opt.inputs.front(), opt.dataset));
}

FitnessQuery query_for(const Options& opt, const FitnessTable& table) {
  FitnessQuery q{parse_split(opt.split), opt.epoch, opt.metric};
  if (q.metric.empty()) q.metric = table.metrics().front();
  return q;
}

Direction direction_of(const Options& opt) {
  if (opt.direction == "max") return Direction::maximize;
  if (opt.direction == "min") return Direction::minimize;
  throw Error(ErrorKind::usage, "--direction must be 'max' or 'min'");
}

std::vector<double> all_values(const TabularLandscape& landscape) {
  std::vector<double> values;
  for (const auto& r : landscape.table().records()) values.push_back(landscape.fitness(r.genotype));
  return values;
}

SampleSet samples_for(Context& ctx, const Landscape& landscape) {
  const std::size_t n = std::min<std::size_t>(ctx.opt().samples, *landscape.size());
  return draw_samples(landscape, parse_sample_method(ctx.opt().sampling), n, ctx.seed());
}

// ------------------------------------------------------------- commands

ordered_json cmd_validate(Context& ctx) {
  const auto table = load_input(ctx.opt());
  ordered_json s;
  s["dataset"] = table->dataset_name();
  s["records"] = table->size();
  s["encoding"] = table->encoding() == GenotypeEncoding::cell ? "cell" : "bitstring";
  s["genotype_bits"] = table->genotype_bits();
  s["epochs"] = table->epochs();
  std::vector<std::string> splits;
  for (auto sp : table->splits()) splits.emplace_back(to_string(sp));
  s["splits"] = splits;
  s["metrics"] = table->metrics();
  return s;
}

ordered_json cmd_density(Context& ctx) {
  const auto table = load_input(ctx.opt());
  const TabularLandscape landscape(table, query_for(ctx.opt(), *table));
  const auto values = all_values(landscape);
  DensityOptions options;
  options.bins = ctx.opt().bins;
  options.kind = ctx.opt().kde ? DensityCurve::Kind::kernel : DensityCurve::Kind::histogram;
  const DensityCurve curve = empirical_density(values, options);

  auto out = ctx.open_csv("density.csv");
  out.precision(17);
  if (curve.kind == DensityCurve::Kind::histogram) {
    out << "bin_lo,bin_hi,density\n";
    for (std::size_t i = 0; i < curve.density.size(); ++i) {
      out << curve.grid[i] << ',' << curve.grid[i + 1] << ',' << curve.density[i] << '\n';
    }
  } else {
    out << "x,density\n";
    for (std::size_t i = 0; i < curve.density.size(); ++i) out << curve.grid[i] << ',' << curve.density[i] << '\n';
  }
  return {{"values", values.size()}, {"mean", mean(values)}, {"std", stddev(values)}};
}

ordered_json cmd_fit(Context& ctx) {
  const auto table = load_input(ctx.opt());
  const TabularLandscape landscape(table, query_for(ctx.opt(), *table));
  const auto values = all_values(landscape);
  std::vector<DistributionFit> fits;
  for (const auto& name : ctx.opt().families) fits.push_back(fit_distribution(values, parse_family(name)));

  {
    auto out = ctx.open_csv("fit_report.csv");
    write_fit_report_csv(out, fits);
  }
  ctx.write_json("fit_report.json", fit_report_json(fits));
  auto out = ctx.open_csv("qq_pp.csv");
  out.precision(17);
  out << "family,plot,theoretical,empirical\n";
  for (const auto& fit : fits) {
    const auto plots = qq_pp_data(values, fit);
    for (const auto& [t, e] : plots.qq) out << to_string(fit.family) << ",qq," << t << ',' << e << '\n';
    for (const auto& [t, e] : plots.pp) out << to_string(fit.family) << ",pp," << t << ',' << e << '\n';
  }
  const auto best = std::min_element(fits.begin(), fits.end(),
                                     [](const auto& a, const auto& b) { return a.aic < b.aic; });
  return {{"values", values.size()}, {"best_aic", std::string(to_string(best->family))}};
}

ordered_json cmd_fdc(Context& ctx) {
  const auto table = load_input(ctx.opt());
  const TabularLandscape landscape(table, query_for(ctx.opt(), *table));
  const SampleSet samples = samples_for(ctx, landscape);
  const FdcResult result = fdc(landscape, samples.genotypes);
  {
    auto out = ctx.open_csv("fdc_pairs.csv");
    out.precision(17);
    out << "distance,fitness\n";
    for (const auto& [d, f] : result.pairs) out << d << ',' << f << '\n';
  }
  ordered_json body;
  body["optimum"] = result.optimum.to_string();
  body["samples"] = samples.genotypes.size();
  body["pearson_r"] = result.pearson_r ? ordered_json(*result.pearson_r) : ordered_json(nullptr);
  body["slope_per_unit_distance"] = result.slope_per_unit_distance;
  body["intercept"] = result.intercept;
  ctx.write_json("fdc.json", body);
  body.erase("optimum");
  return body;
}

std::vector<Walk> make_walks(Context& ctx, const Landscape& landscape) {
  return random_walks(landscape, ctx.opt().walks, ctx.opt().steps, ctx.seed(), ctx.opt().jobs);
}

ordered_json cmd_walk(Context& ctx) {
  const auto table = load_input(ctx.opt());
  const TabularLandscape landscape(table, query_for(ctx.opt(), *table));
  const auto walks = make_walks(ctx, landscape);
  auto out = ctx.open_csv("walks.csv");
  write_walks_csv(out, walks, ctx.opt().smooth);
  const auto stuck = std::count_if(walks.begin(), walks.end(), [](const Walk& w) { return w.stuck; });
  return {{"routes", walks.size()}, {"stuck", stuck}};
}

ordered_json cmd_ruggedness(Context& ctx) {
  const auto table = load_input(ctx.opt());
  const TabularLandscape landscape(table, query_for(ctx.opt(), *table));
  const auto walks = make_walks(ctx, landscape);
  const RuggednessResult r = ruggedness(walks);
  ordered_json body;
  body["per_route_rho1"] = r.per_route_rho1;
  body["rho_mean"] = r.rho_mean;
  body["tau"] = r.tau ? ordered_json(*r.tau) : ordered_json(nullptr);
  body["skipped"] = r.skipped;
  body["warnings"] = r.warnings;
  ctx.write_json("ruggedness.json", body);
  return {{"rho_mean", r.rho_mean}, {"tau", body["tau"]}};
}

ordered_json cmd_optima(Context& ctx) {
  const auto table = load_input(ctx.opt());
  const TabularLandscape landscape(table, query_for(ctx.opt(), *table));
  BirthdayConfig config;
  config.trials = ctx.opt().trials;
  config.runs_per_trial = ctx.opt().runs;
  config.p_d = ctx.opt().pd;
  config.seed = ctx.seed();
  config.direction = direction_of(ctx.opt());
  config.jobs = ctx.opt().jobs;
  const BirthdayEstimate est = estimate_optima_birthday(landscape, config);
  {
    auto out = ctx.open_csv("optima.csv");
    write_birthday_csv(out, est);
  }
  ordered_json body;
  body["k_mean"] = est.k_mean;
  body["cardinal_estimate"] = est.cardinal_estimate;
  body["failed_trials"] = est.failed_trials;
  body["avg_step"] = est.avg_step;
  body["avg_improvement_pct"] = est.avg_improvement_pct;
  ctx.write_json("optima.json", body);
  return body;
}

ordered_json cmd_persistence(Context& ctx) {
  const auto table = load_input(ctx.opt());
  const FitnessQuery q = query_for(ctx.opt(), *table);
  const TabularLandscape landscape(table, {q.split, table->epochs().front(), q.metric});
  const SampleSet samples = samples_for(ctx, landscape);
  const auto& epochs = table->epochs();
  if (epochs.size() < 2) {
    throw Error(ErrorKind::data, "persistence needs at least 2 epoch budgets in the table");
  }
  std::vector<PersistenceCurve> curves;
  ordered_json summary = ordered_json::array();
  for (RankSide side : {RankSide::top, RankSide::bottom}) {
    for (std::size_t h = 2; h <= epochs.size(); ++h) {
      std::vector<int> horizon(epochs.begin(), epochs.begin() + static_cast<std::ptrdiff_t>(h));
      curves.push_back(persistence_curve(*table, samples.genotypes, side, q.split, q.metric, horizon));
      const auto& c = curves.back();
      summary.push_back({{"side", std::string(to_string(side))},
                         {"horizon", c.horizon},
                         {"pi_q1", c.values[kQ1Rank - 1] ? ordered_json(*c.values[kQ1Rank - 1]) : nullptr},
                         {"auc_q1", c.auc_q1 ? ordered_json(*c.auc_q1) : nullptr}});
    }
  }
  {
    auto out = ctx.open_csv("persistence.csv");
    write_persistence_csv(out, curves);
  }
  ctx.write_json("persistence.json", {{"samples", samples.genotypes.size()}, {"curves", summary}});
  return {{"samples", samples.genotypes.size()}, {"curves", curves.size()}};
}

FootprintConfig footprint_config(Context& ctx, const FitnessTable& table) {
  const auto& o = ctx.opt();
  FootprintConfig c;
  c.seed = ctx.seed();
  c.n_samples = o.samples;
  c.sampling = parse_sample_method(o.sampling);
  c.n_walks = o.walks;
  c.walk_steps = o.steps;
  c.trials = o.trials;
  c.runs = o.runs;
  c.p_d = o.pd;
  c.skip_birthday = o.skip_birthday;
  c.split = parse_split(o.split);
  c.epoch = o.epoch;
  c.metric = o.metric.empty() ? table.metrics().front() : o.metric;
  c.jobs = o.jobs;
  return c;
}

ordered_json cmd_footprint(Context& ctx) {
  const auto table = load_input(ctx.opt());
  const FootprintReport report = compute_footprint(table, footprint_config(ctx, *table));
  auto j = footprint_to_json(report);
  j["provenance"]["config"] = ctx.resolved_config();
  {
    auto out = ctx.open("footprint.json");
    out << j.dump(2) << '\n';
  }
  return {{"dataset", report.dataset}, {"metrics", j["metrics"]}};
}

ordered_json cmd_compare(Context& ctx) {
  if (ctx.opt().inputs.size() < 2) throw Error(ErrorKind::usage, "compare needs at least 2 --input footprints");
  std::vector<FootprintReport> reports;
  for (const auto& path : ctx.opt().inputs) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::data, "cannot open footprint '" + path + "'");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path + ": " + e.what());
    }
    reports.push_back(footprint_from_json(j));
  }
  const FootprintComparison cmp = compare_footprints(reports);
  ctx.write_json("comparison.json", comparison_to_json(cmp));
  auto out = ctx.open_csv("radar.csv");
  write_radar_csv(out, cmp);
  return {{"reports", reports.size()}};
}

ordered_json cmd_gen_nk(Context& ctx) {
  const auto& o = ctx.opt();
  const NKLandscape nk = generate_nk({o.nk_n, o.nk_k, ctx.seed()});
  const FitnessTable table = table_from_landscape(nk, o.epochs, parse_split(o.split), o.nk_metric,
                                                  o.noise, derive_seed(ctx.seed(), 1));
  const std::string name = nk.name() + ".jsonl";
  auto out = ctx.open(name);
  write_table(table, out);
  return {{"records", table.size()}, {"table", (fs::path(o.out) / name).string()}};
}

ordered_json cmd_sample_size_study(Context& ctx) {
  const auto table = load_input(ctx.opt());
  const TabularLandscape landscape(table, query_for(ctx.opt(), *table));
  std::vector<std::size_t> sizes = ctx.opt().sizes;
  for (auto& s : sizes) s = std::min<std::size_t>(s, table->size());
  const SampleSizeStudy study = sample_size_study(landscape, sizes, ctx.seed(), ctx.opt().bins,
                                                  parse_sample_method(ctx.opt().sampling));
  {
    auto out = ctx.open_csv("sample_size_density.csv");
    out.precision(17);
    out << "size,bin_lo,bin_hi,density\n";
    for (std::size_t i = 0; i < study.curves.size(); ++i) {
      const auto& c = study.curves[i];
      for (std::size_t b = 0; b < c.density.size(); ++b) {
        out << study.sizes[i] << ',' << c.grid[b] << ',' << c.grid[b + 1] << ',' << c.density[b] << '\n';
      }
    }
  }
  auto out = ctx.open_csv("sample_size_l1.csv");
  out.precision(17);
  out << "from_size,to_size,l1\n";
  for (std::size_t i = 0; i < study.l1.size(); ++i) {
    out << study.sizes[i] << ',' << study.sizes[i + 1] << ',' << study.l1[i] << '\n';
  }
  return {{"sizes", study.sizes}, {"l1", study.l1}};
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::usage: return kExitUsage;
    case ErrorKind::data: return kExitData;
    case ErrorKind::numeric: return kExitNumeric;
  }
  return kExitData;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Fitness landscape footprint analysis for tabular architecture benchmarks", "lfp"};
  app.set_config("--config", "", "Key = value config file; command-line flags take precedence");
  app.require_subcommand(1, 1);
  app.fallthrough();

  app.add_option("-i,--input", opt.inputs, "Benchmark JSONL (or footprint JSON files for compare)");
  app.add_option("--dataset", opt.dataset, "Dataset name (defaults to the input file stem)");
  app.add_option("--split", opt.split, "train | validation | test")->capture_default_str();
  app.add_option("--epoch", opt.epoch, "Epoch budget for static analyses")->capture_default_str();
  app.add_option("--epochs", opt.epochs, "gen-nk: epoch budgets to emit")->delimiter(',');
  app.add_option("--metric", opt.metric, "Metric name (defaults to the table's first metric)");
  auto* seed_opt = app.add_option("--seed", opt.seed, "Master seed (env LFP_SEED)")->envname("LFP_SEED");
  app.add_option("--samples", opt.samples, "Sample size")->capture_default_str();
  app.add_option("--sampling", opt.sampling, "lhs | uniform")->capture_default_str();
  app.add_option("--walks", opt.walks, "Random-walk routes")->capture_default_str();
  app.add_option("--steps", opt.steps, "Steps per walk")->capture_default_str();
  app.add_option("--smooth", opt.smooth, "walk: moving-average window for the exported fitness");
  app.add_option("--trials", opt.trials, "Birthday trials T")->capture_default_str();
  app.add_option("--runs", opt.runs, "BILS runs per trial M")->capture_default_str();
  app.add_option("--pd", opt.pd, "Duplicate probability P_D")->capture_default_str();
  app.add_option("--direction", opt.direction, "max | min")->capture_default_str();
  app.add_option("--family", opt.families, "fit: beta, weibull, lognormal")->delimiter(',');
  app.add_option("--bins", opt.bins, "Histogram bins")->capture_default_str();
  app.add_flag("--kde", opt.kde, "density: Gaussian kernel estimate instead of a histogram");
  app.add_option("--n", opt.nk_n, "gen-nk: bitstring length")->capture_default_str();
  app.add_option("--k", opt.nk_k, "gen-nk: epistatic neighbors per locus")->capture_default_str();
  app.add_option("--noise", opt.noise, "gen-nk: per-epoch uniform perturbation amplitude");
  app.add_option("--nk-metric", opt.nk_metric, "gen-nk: metric name to emit");
  app.add_option("--sizes", opt.sizes, "sample-size-study: sample sizes")->delimiter(',');
  app.add_option("-o,--out", opt.out, "Output directory")->capture_default_str();
  app.add_flag("--force", opt.force, "Overwrite existing artifacts");
  app.add_option("-j,--jobs", opt.jobs, "Worker threads for walks and local searches")->check(CLI::PositiveNumber);
  app.add_flag("--skip-birthday", opt.skip_birthday, "footprint: leave cardinal_optima null");

  using Handler = ordered_json (*)(Context&);
  const std::vector<std::pair<std::string, std::pair<std::string, Handler>>> commands = {
      {"validate", {"Load a benchmark and report its shape", cmd_validate}},
      {"density", {"Empirical density of fitness", cmd_density}},
      {"fit", {"Beta / Weibull / LogNormal fits with AIC and BIC", cmd_fit}},
      {"fdc", {"Fitness-distance correlation over a sample", cmd_fdc}},
      {"walk", {"Export random walks", cmd_walk}},
      {"ruggedness", {"Lag-1 autocorrelation over random walks", cmd_ruggedness}},
      {"optima", {"Birthday-problem estimate of the number of local optima", cmd_optima}},
      {"persistence", {"Positive and negative persistence curves", cmd_persistence}},
      {"footprint", {"All eight footprint metrics", cmd_footprint}},
      {"compare", {"Min-max normalized comparison of footprints", cmd_compare}},
      {"gen-nk", {"Write an NK landscape as a benchmark table", cmd_gen_nk}},
      {"sample-size-study", {"Density convergence across sample sizes", cmd_sample_size_study}},
  };
  for (const auto& [name, entry] : commands) app.add_subcommand(name, entry.first);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream usage_out, usage_err;
    const int code = app.exit(e, usage_out, usage_err);
    out << usage_out.str();
    err << usage_err.str();
    return code == 0 ? kExitOk : kExitUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  const auto handler = std::find_if(commands.begin(), commands.end(),
                                    [&](const auto& c) { return c.first == command; })
                           ->second.second;
  Context ctx(command, opt, seed_opt->count() > 0);
  try {
    ordered_json summary;
    summary["command"] = command;
    summary["status"] = "ok";
    summary["result"] = handler(ctx);
    summary["artifacts"] = ctx.artifacts();
    out << summary.dump() << '\n';
    return kExitOk;
  } catch (const Error& e) {
    err << "lfp " << command << ": " << e.what() << '\n';
    out << ordered_json{{"command", command}, {"status", "error"}, {"message", e.what()}}.dump() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "lfp " << command << ": " << e.what() << '\n';
    out << ordered_json{{"command", command}, {"status", "error"}, {"message", e.what()}}.dump() << '\n';
    return kExitData;
  }
}

}  // namespace lfp::cli
