#include "lfp/sampling.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include "lfp/error.hpp"
#include "lfp/parallel.hpp"

namespace lfp {

std::string_view to_string(SampleMethod method) {
  return method == SampleMethod::lhs ? "lhs" : "uniform";
}

SampleMethod parse_sample_method(std::string_view text) {
  if (text == "lhs") return SampleMethod::lhs;
  if (text == "uniform") return SampleMethod::uniform;
  throw Error(ErrorKind::usage, "unknown sampling method '" + std::string(text) + "'");
}

SampleSet sample_uniform(const Landscape& landscape, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw SamplingError("sample size must be at least 1");
  const auto space = landscape.size();
  if (space && n > *space) {
    throw SamplingError("cannot draw " + std::to_string(n) + " distinct samples from a space of " +
                        std::to_string(*space));
  }
  SampleSet out{{}, SampleMethod::uniform, seed, {}};
  Rng rng(seed);
  out.genotypes.reserve(n);

  // Dense requests: partial shuffle of the full enumeration.
  if (space && n * 2 > *space && *space <= kDefaultEnumerationCap) {
    auto all = landscape.enumerate(kDefaultEnumerationCap);
    for (std::size_t i = 0; i < n; ++i) {
      std::swap(all[i], all[i + rng.index(all.size() - i)]);
      out.genotypes.push_back(std::move(all[i]));
    }
    return out;
  }

  std::unordered_set<Genotype, GenotypeHash> seen;
  while (out.genotypes.size() < n) {
    Genotype g = landscape.random_member(rng);
    if (seen.insert(g).second) out.genotypes.push_back(std::move(g));
  }
  return out;
}

SampleSet sample_lhs(const Landscape& landscape, std::size_t n, std::uint64_t seed,
                     std::size_t retry_factor) {
  if (n == 0) throw SamplingError("sample size must be at least 1");
  const std::vector<int> levels = landscape.lhs_levels();
  const std::size_t dims = levels.size();
  Rng rng(seed);

  // perm[d][i]: stratum of sample i in dimension d.
  std::vector<std::vector<int>> perm(dims, std::vector<int>(n));
  for (auto& p : perm) {
    std::iota(p.begin(), p.end(), 0);
    rng.shuffle(std::span<int>(p));
  }

  SampleSet out{{}, SampleMethod::lhs, seed, {}};
  std::unordered_set<Genotype, GenotypeHash> seen;
  std::vector<int> point(dims);
  std::vector<std::vector<int>> accepted_points;
  const std::size_t budget = retry_factor * n;
  std::size_t rejections = 0;

  for (std::size_t i = 0; i < n;) {
    for (std::size_t d = 0; d < dims; ++d) {
      const double u = (perm[d][i] + rng.uniform01()) / static_cast<double>(n);
      point[d] = std::min(levels[d] - 1, static_cast<int>(u * levels[d]));
    }
    auto g = landscape.from_lhs_point(point);
    if (g && seen.insert(*g).second) {
      out.genotypes.push_back(std::move(*g));
      accepted_points.push_back(point);
      ++i;
      continue;
    }
    if (++rejections > budget) {
      throw SamplingError("LHS could not produce " + std::to_string(n) +
                          " distinct valid samples within " + std::to_string(budget) +
                          " retries (got " + std::to_string(i) + ")");
    }
    if (dims == 0 || n == 1) continue;
    const std::size_t d = rng.index(dims);
    if (i + 1 < n) {
      const std::size_t j = i + 1 + rng.index(n - i - 1);
      std::swap(perm[d][i], perm[d][j]);
      continue;
    }
    // Last sample: trade a stratum with an accepted sample, keeping the trade
    // only if that sample still maps to a distinct member.
    const std::size_t j = rng.index(i);
    std::swap(perm[d][i], perm[d][j]);
    std::vector<int> moved = accepted_points[j];
    const double u = (perm[d][j] + rng.uniform01()) / static_cast<double>(n);
    moved[d] = std::min(levels[d] - 1, static_cast<int>(u * levels[d]));
    auto replacement = landscape.from_lhs_point(moved);
    if (replacement && (*replacement == out.genotypes[j] || !seen.count(*replacement))) {
      seen.erase(out.genotypes[j]);
      seen.insert(*replacement);
      out.genotypes[j] = std::move(*replacement);
      accepted_points[j] = std::move(moved);
    } else {
      std::swap(perm[d][i], perm[d][j]);
    }
  }

  out.strata.assign(n, std::vector<int>(dims));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t d = 0; d < dims; ++d) out.strata[i][d] = perm[d][i];
  return out;
}

SampleSet draw_samples(const Landscape& landscape, SampleMethod method, std::size_t n,
                       std::uint64_t seed) {
  return method == SampleMethod::lhs ? sample_lhs(landscape, n, seed)
                                     : sample_uniform(landscape, n, seed);
}

Walk random_walk(const Landscape& landscape, const Genotype& start, std::size_t steps,
                 std::uint64_t seed, std::size_t route_id) {
  if (steps == 0) throw SamplingError("walk needs at least one step");
  if (!landscape.contains(start)) throw LookupError("walk start is not a member of the landscape");
  Walk walk;
  walk.route_id = route_id;
  walk.genotypes.reserve(steps + 1);
  walk.fitness_series.reserve(steps + 1);
  walk.genotypes.push_back(start);
  walk.fitness_series.push_back(landscape.fitness(start));
  Rng rng(seed);
  for (std::size_t s = 0; s < steps; ++s) {
    auto options = landscape.neighbors(walk.genotypes.back());
    if (options.empty()) {
      walk.stuck = true;
      break;
    }
    Genotype next = std::move(options[rng.index(options.size())]);
    walk.fitness_series.push_back(landscape.fitness(next));
    walk.genotypes.push_back(std::move(next));
  }
  return walk;
}

std::vector<Walk> random_walks(const Landscape& landscape, std::size_t count, std::size_t steps,
                               std::uint64_t seed, unsigned jobs) {
  std::vector<Walk> walks(count);
  parallel_for(count, jobs, [&](std::size_t r) {
    Rng start_rng(derive_seed(seed, 2 * r));
    const Genotype start = landscape.random_member(start_rng);
    walks[r] = random_walk(landscape, start, steps, derive_seed(seed, 2 * r + 1), r);
  });
  return walks;
}

std::vector<double> moving_average(std::span<const double> series, std::size_t window) {
  std::vector<double> out(series.size());
  if (window == 0) window = 1;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const std::size_t first = i + 1 >= window ? i + 1 - window : 0;
    double sum = 0.0;
    for (std::size_t j = first; j <= i; ++j) sum += series[j];
    out[i] = sum / static_cast<double>(i + 1 - first);
  }
  return out;
}

void write_walks_csv(std::ostream& out, std::span<const Walk> walks, std::size_t window) {
  out << "route_id,step,genotype,fitness\n";
  const auto old_precision = out.precision(17);
  for (const auto& w : walks) {
    const auto series = window > 1 ? moving_average(w.fitness_series, window) : w.fitness_series;
    for (std::size_t s = 0; s < w.genotypes.size(); ++s) {
      out << w.route_id << ',' << s << ',' << w.genotypes[s].to_string() << ',' << series[s] << '\n';
    }
  }
  out.precision(old_precision);
}

}  // namespace lfp
