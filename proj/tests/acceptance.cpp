// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>

#include <boost/math/distributions/normal.hpp>

#include "json.hpp"
#include "lfp/analysis.hpp"
#include "lfp/benchmark.hpp"
#include "lfp/footprint.hpp"
#include "lfp/genotype.hpp"
#include "lfp/sampling.hpp"
#include "lfp/stats.hpp"

using namespace lfp;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int digits = 6) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

// ---------------------------------------------------------------- 1

Outcome birthday_arithmetic() {
  const auto t0 = Clock::now();
  const std::vector<int> ks{26, 38, 52, 57, 58, 94, 129, 195, 197};
  const std::vector<std::uint64_t> expected{487, 1041, 1950, 2343, 2426, 6373, 12003, 27429, 27994};
  Outcome o;
  std::size_t matched = 0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const auto got = birthday_cardinal(ks[i], 0.5);
    if (got == expected[i]) {
      ++matched;
    } else {
      o.pass = false;
      o.detail += "k=" + std::to_string(ks[i]) + " gave " + std::to_string(got) + "; ";
    }
  }
  const double dt = seconds_since(t0);
  if (dt >= 1.0) o.pass = false;
  o.detail += std::to_string(matched) + "/9 rows exact, " + fmt(dt, 3) + " s";
  return o;
}

// ---------------------------------------------------------------- 2

Outcome aic_bic_identities() {
  const auto t0 = Clock::now();
  Outcome o;
  const double weibull = aic(534817.0), lognormal = aic(250868.0);
  const double small_aic = aic(92.24), small_bic = bic(92.24, 100);
  o.pass = weibull == -1069630.0 && lognormal == -501732.0 && std::abs(small_aic - -180.48) <= 0.1 &&
           std::abs(small_bic - -175.27) <= 0.1;
  const double dt = seconds_since(t0);
  if (dt >= 1.0) o.pass = false;
  o.detail = "aic " + fmt(weibull, 10) + ", " + fmt(lognormal, 10) + ", " + fmt(small_aic, 6) + "; bic " +
             fmt(small_bic, 6);
  return o;
}

// ---------------------------------------------------------------- 3

Outcome optima_calibration() {
  const auto t0 = Clock::now();
  const NKLandscape nk({12, 2, 1});
  const auto exact = enumerate_optima_exhaustive(nk, Direction::maximize);
  const std::unordered_set<Genotype, GenotypeHash> optima(exact.optima.begin(), exact.optima.end());
  std::vector<double> estimates;
  std::size_t endpoints = 0, strays = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    BirthdayConfig cfg;
    cfg.trials = 9;
    cfg.runs_per_trial = 200;
    cfg.p_d = 0.5;
    cfg.seed = seed;
    const auto est = estimate_optima_birthday(nk, cfg);
    estimates.push_back(static_cast<double>(est.cardinal_estimate));
    for (const auto& t : est.trials) {
      for (const auto& g : t.endpoints) {
        ++endpoints;
        strays += optima.count(g) == 0;
      }
    }
  }
  std::sort(estimates.begin(), estimates.end());
  const double median = 0.5 * (estimates[9] + estimates[10]);
  const double truth = static_cast<double>(exact.count);
  const double dt = seconds_since(t0);
  Outcome o;
  o.pass = median >= truth / 3.0 && median <= 3.0 * truth && strays == 0 && dt < 120.0;
  o.detail = "exhaustive " + std::to_string(exact.count) + ", median estimate " + fmt(median) + " (band [" +
             fmt(truth / 3.0) + ", " + fmt(3.0 * truth) + "]), " + std::to_string(strays) + "/" +
             std::to_string(endpoints) + " endpoints off the optima list, " + fmt(dt, 3) + " s";
  return o;
}

// ---------------------------------------------------------------- 4

double direct_acf(const std::vector<double>& f, std::size_t k) {
  double m = 0.0;
  for (double v : f) m += v;
  m /= static_cast<double>(f.size());
  double var = 0.0;
  for (double v : f) var += (v - m) * (v - m);
  var /= static_cast<double>(f.size());
  double e = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < f.size(); ++i)
    for (std::size_t j = 0; j < f.size(); ++j)
      if (j == i + k) {
        e += (f[i] - m) * (f[j] - m);
        ++pairs;
      }
  return std::clamp((e / static_cast<double>(pairs)) / var, -1.0, 1.0);
}

Outcome autocorrelation_oracle() {
  Rng rng(4);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    std::vector<double> xs(10 + rng.index(300));
    for (auto& x : xs) x = rng.uniform01();
    worst = std::max(worst, std::abs(autocorrelation(xs, 1) - direct_acf(xs, 1)));
  }
  std::vector<double> alt(100);
  for (std::size_t i = 0; i < alt.size(); ++i) alt[i] = static_cast<double>(i % 2);
  const double rho = autocorrelation(alt, 1);
  return {worst <= 1e-10 && rho == -1.0,
          "max deviation " + fmt(worst, 3) + " over 100 series, alternating rho(1) = " + fmt(rho, 17)};
}

// ---------------------------------------------------------------- 5

double oracle_persistence(const std::vector<std::vector<double>>& m, bool top, int n_percent) {
  const std::size_t s = m.front().size();
  const std::size_t k = (static_cast<std::size_t>(n_percent) * s + 99) / 100;
  auto members = [&](std::size_t e) {
    std::vector<double> sorted = m[e];
    std::sort(sorted.begin(), sorted.end());
    if (top) std::reverse(sorted.begin(), sorted.end());
    const double cut = sorted[k - 1];
    std::set<std::size_t> out;
    for (std::size_t i = 0; i < s; ++i)
      if (top ? m[e][i] >= cut : m[e][i] <= cut) out.insert(i);
    return out;
  };
  const std::set<std::size_t> first = members(0);
  std::set<std::size_t> common = first;
  for (std::size_t e = 1; e < m.size(); ++e) {
    const auto next = members(e);
    std::set<std::size_t> keep;
    std::set_intersection(common.begin(), common.end(), next.begin(), next.end(), std::inserter(keep, keep.end()));
    common = std::move(keep);
  }
  return static_cast<double>(common.size()) / static_cast<double>(first.size());
}

Outcome persistence_oracle() {
  Rng rng(12);
  std::size_t mismatches = 0, checked = 0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t models = 2 + rng.index(49);
    const std::size_t n_epochs = 2 + rng.index(3);
    std::vector<int> epochs;
    for (std::size_t e = 0; e < n_epochs; ++e) epochs.push_back(static_cast<int>(4 * (e + 1)));
    std::vector<FitnessRecord> recs;
    std::vector<std::vector<double>> m(n_epochs, std::vector<double>(models));
    std::vector<Genotype> samples;
    for (std::size_t i = 0; i < models; ++i) {
      const Genotype g = genotype_from_index(i, 6);
      std::vector<Measurement> run;
      for (std::size_t e = 0; e < n_epochs; ++e) {
        m[e][i] = static_cast<double>(rng.index(11)) / 10.0;  // coarse values force ties
        run.push_back({Split::test, epochs[e], "acc", m[e][i]});
      }
      recs.push_back({"m" + std::to_string(i), g, std::nullopt, {run}});
      samples.push_back(g);
    }
    const FitnessTable table("random", recs);
    for (auto side : {RankSide::top, RankSide::bottom}) {
      const auto curve = persistence_curve(table, samples, side, Split::test, "acc");
      for (int n = 1; n <= 100; ++n) {
        ++checked;
        if (!curve.values[n - 1] || *curve.values[n - 1] != oracle_persistence(m, side == RankSide::top, n)) {
          ++mismatches;
        }
      }
    }
  }

  // identical epochs
  bool identical_ok = true;
  const NKLandscape nk({8, 2, 3});
  const std::vector<int> same{1, 2, 3};
  const FitnessTable flat = table_from_landscape(nk, same, Split::test, "acc");
  const auto all = nk.enumerate(256);
  for (auto side : {RankSide::top, RankSide::bottom}) {
    const auto c = persistence_curve(flat, all, side, Split::test, "acc");
    for (const auto& v : c.values) identical_ok = identical_ok && v && *v == 1.0;
    identical_ok = identical_ok && c.auc_q1 && *c.auc_q1 == 1.0;
  }
  return {mismatches == 0 && identical_ok, std::to_string(mismatches) + "/" + std::to_string(checked) +
                                               " mismatches on 200 random tables, identical epochs " +
                                               (identical_ok ? "give 1" : "deviate")};
}

// ---------------------------------------------------------------- 6

Outcome fdc_checks() {
  // fitness falls by 0.05 per bit away from the all-zero optimum
  std::vector<FitnessRecord> recs;
  for (std::uint64_t v = 0; v < 64; ++v) {
    const Genotype g = genotype_from_index(v, 6);
    recs.push_back({g.to_string(), g, std::nullopt,
                    {{{Split::test, 36, "acc", 0.9 - 0.05 * static_cast<double>(g.popcount())}}}});
  }
  auto table = std::make_shared<const FitnessTable>("line", recs);
  const TabularLandscape land(table, {Split::test, 36, "acc"});
  const auto members = land.enumerate(64);
  const FdcResult line = fdc(land, members);
  const bool line_ok = line.pearson_r && std::abs(*line.pearson_r + 1.0) <= 1e-12 &&
                       std::abs(line.slope_per_unit_distance + 0.05) <= 1e-12;

  const NKLandscape nk({12, 3, 8});
  const auto all = nk.enumerate(kDefaultEnumerationCap);
  const FdcResult r = fdc(nk, all);
  std::vector<double> d, f;
  for (const auto& [dist, fit] : r.pairs) {
    d.push_back(static_cast<double>(dist));
    f.push_back(fit);
  }
  // plain two-pass Pearson over the exported pairs
  double md = 0, mf = 0;
  for (std::size_t i = 0; i < d.size(); ++i) md += d[i], mf += f[i];
  md /= static_cast<double>(d.size());
  mf /= static_cast<double>(f.size());
  double sdf = 0, sdd = 0, sff = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    sdf += (d[i] - md) * (f[i] - mf);
    sdd += (d[i] - md) * (d[i] - md);
    sff += (f[i] - mf) * (f[i] - mf);
  }
  const double recomputed = sdf / std::sqrt(sdd * sff);
  const double gap = r.pearson_r ? std::abs(recomputed - *r.pearson_r) : 1.0;
  return {line_ok && gap <= 1e-12, "collinear r = " + fmt(line.pearson_r.value_or(NAN), 17) + ", slope " +
                                       fmt(line.slope_per_unit_distance, 17) + "; NK(12,3) recompute gap " +
                                       fmt(gap, 3)};
}

// ---------------------------------------------------------------- 7

Outcome mle_recovery() {
  Rng rng(2718);
  const boost::math::normal_distribution<> z;
  std::vector<double> weibull(10000), lognormal(10000);
  for (auto& x : weibull) x = -std::log1p(-rng.uniform01());  // Weibull(1, 1) by inversion
  for (auto& x : lognormal) {
    double u = rng.uniform01();
    while (u == 0.0) u = rng.uniform01();
    x = std::exp(0.25 * boost::math::quantile(z, u));
  }
  const auto fw = fit_distribution(weibull, DistributionFamily::weibull);
  const auto fl = fit_distribution(lognormal, DistributionFamily::lognormal);
  const double shape_err = std::abs(fw.params.first - 1.0);
  const double sigma_err = std::abs(fl.params.second - 0.25) / 0.25;
  return {shape_err <= 0.05 && sigma_err <= 0.05,
          "weibull shape " + fmt(fw.params.first) + ", lognormal sigma " + fmt(fl.params.second)};
}

// ---------------------------------------------------------------- 8

bool reaches(int n, const std::vector<std::uint8_t>& adj) {
  int edges = 0;
  for (auto a : adj) edges += a;
  if (edges > kMaxEdges) return false;
  std::vector<bool> fwd(n), bwd(n);
  fwd[0] = true;
  bwd[n - 1] = true;
  for (int v = 1; v < n; ++v)
    for (int u = 0; u < v; ++u) fwd[v] = fwd[v] || (fwd[u] && adj[u * n + v]);
  for (int u = n - 2; u >= 0; --u)
    for (int v = u + 1; v < n; ++v) bwd[u] = bwd[u] || (bwd[v] && adj[u * n + v]);
  if (!fwd[n - 1]) return false;
  for (int v = 1; v + 1 < n; ++v) {
    bool touched = false;
    for (int u = 0; u < n; ++u) touched = touched || adj[u * n + v] || adj[v * n + u];
    if (touched && !(fwd[v] && bwd[v])) return false;
  }
  return true;
}

Outcome encoding_round_trip() {
  const auto t0 = Clock::now();
  std::size_t cells = 0, failures = 0;
  std::unordered_set<Genotype, GenotypeHash> genotypes;
  for (int n = 2; n <= 5; ++n) {
    std::vector<std::pair<int, int>> pairs;
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v) pairs.emplace_back(u, v);
    int combos = 1;
    for (int i = 0; i < n - 2; ++i) combos *= 3;
    for (std::uint32_t mask = 0; mask < (1u << pairs.size()); ++mask) {
      std::vector<std::uint8_t> adj(n * n, 0);
      for (std::size_t p = 0; p < pairs.size(); ++p)
        if (mask >> p & 1u) adj[pairs[p].first * n + pairs[p].second] = 1;
      if (!reaches(n, adj)) continue;
      for (int oc = 0; oc < combos; ++oc) {
        std::vector<OperatorLabel> ops;
        for (int i = 0, r = oc; i < n - 2; ++i, r /= 3) ops.push_back(static_cast<OperatorLabel>(r % 3));
        CellSpec cell(n, ops);
        cell.adjacency = adj;
        ++cells;
        try {
          const Genotype g = encode_cell(cell);
          if (!(decode_genotype(g) == canonical(cell))) ++failures;
          genotypes.insert(g);
        } catch (const std::exception&) {
          ++failures;
        }
      }
    }
  }

  // neighbors of every member of the resulting cell table
  std::vector<FitnessRecord> recs;
  for (const auto& g : genotypes) {
    recs.push_back({g.to_string(), g, decode_genotype(g), {{{Split::test, 36, "acc", 0.5}}}});
  }
  auto table = std::make_shared<const FitnessTable>("cells", recs);
  const TabularLandscape land(table, {Split::test, 36, "acc"});
  std::size_t neighbor_links = 0, bad_links = 0;
  for (const auto& r : table->records()) {
    for (const auto& y : land.neighbors(r.genotype)) {
      ++neighbor_links;
      bad_links += hamming(y, r.genotype) != 1;
    }
  }
  const NKLandscape nk({16, 2, 1});
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    const Genotype x = nk.random_member(rng);
    for (const auto& y : nk.neighbors(x)) {
      ++neighbor_links;
      bad_links += hamming(x, y) != 1;
    }
  }
  const double dt = seconds_since(t0);
  return {failures == 0 && bad_links == 0 && neighbor_links > 0 && dt < 60.0,
          std::to_string(cells) + " valid cells (" + std::to_string(genotypes.size()) + " canonical), " +
              std::to_string(failures) + " round-trip failures, " + std::to_string(bad_links) + "/" +
              std::to_string(neighbor_links) + " neighbor links off distance 1, " + fmt(dt, 3) + " s"};
}

// ---------------------------------------------------------------- 9

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int sh(const std::string& cmd) { return std::system((cmd + " > /dev/null 2>&1").c_str()); }

Outcome footprint_determinism() {
  const fs::path dir = fs::temp_directory_path() / "lfp_acceptance_footprint";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string cli = LFP_CLI_PATH;
  Outcome o;
  if (sh(cli + " gen-nk --n 12 --k 2 --seed 9 --epochs 4,12,36 --noise 0.02 --out " + dir.string()) != 0) {
    return {false, "gen-nk failed"};
  }
  const std::string table = (dir / "nk-n12-k2-s9.jsonl").string();
  const std::string args = " footprint -i " + table + " --seed 17 --jobs 2 --out ";
  if (sh(cli + args + (dir / "a").string()) != 0 || sh(cli + args + (dir / "b").string()) != 0) {
    return {false, "footprint command failed"};
  }
  const std::string a = slurp(dir / "a" / "footprint.json"), b = slurp(dir / "b" / "footprint.json");
  const auto j = nlohmann::json::parse(a);
  std::size_t numeric = 0;
  for (const auto& [k, v] : j["metrics"].items()) numeric += v.is_number();
  o.pass = !a.empty() && a == b && j["metrics"].size() == 8;
  o.detail = std::string(a == b ? "byte-identical" : "outputs differ") + " (" + std::to_string(a.size()) +
             " bytes), " + std::to_string(j["metrics"].size()) + " metric fields, " + std::to_string(numeric) +
             " non-null";
  fs::remove_all(dir);
  return o;
}

// ---------------------------------------------------------------- 10

Outcome sample_size_convergence() {
  const NKLandscape nk({14, 3, 1});
  const std::vector<std::size_t> sizes{100, 200, 500, 1000};
  const std::size_t repeats = 10;
  std::vector<double> mean_l1(sizes.size() - 1, 0.0);
  std::size_t monotone_runs = 0;
  for (std::uint64_t seed = 0; seed < repeats; ++seed) {
    const auto study = sample_size_study(nk, sizes, seed);
    bool monotone = true;
    for (std::size_t i = 0; i < study.l1.size(); ++i) {
      mean_l1[i] += study.l1[i] / static_cast<double>(repeats);
      if (i > 0 && study.l1[i] > 1.1 * study.l1[i - 1]) monotone = false;
    }
    monotone_runs += monotone;
  }
  bool pass = true;
  for (std::size_t i = 1; i < mean_l1.size(); ++i) pass = pass && mean_l1[i] <= 1.1 * mean_l1[i - 1];
  std::string detail = "mean L1 over " + std::to_string(repeats) + " draws:";
  for (double d : mean_l1) detail += " " + fmt(d, 4);
  detail += "; " + std::to_string(monotone_runs) + "/" + std::to_string(repeats) + " single draws monotone";
  return {pass, detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"birthday arithmetic", birthday_arithmetic},
      {"aic/bic identities", aic_bic_identities},
      {"optima estimator calibration", optima_calibration},
      {"autocorrelation", autocorrelation_oracle},
      {"persistence", persistence_oracle},
      {"fdc", fdc_checks},
      {"mle recovery", mle_recovery},
      {"encoding", encoding_round_trip},
      {"determinism", footprint_determinism},
      {"sample-size convergence", sample_size_convergence},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first << ": " << o.detail
              << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
