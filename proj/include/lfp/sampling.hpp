#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "lfp/benchmark.hpp"

namespace lfp {

enum class SampleMethod : std::uint8_t { uniform, lhs };

std::string_view to_string(SampleMethod method);
SampleMethod parse_sample_method(std::string_view text);

struct SampleSet {
  std::vector<Genotype> genotypes;
  SampleMethod method = SampleMethod::uniform;
  std::uint64_t seed = 0;
  /// LHS only: strata[i][d] is the stratum sample i occupies in dimension d.
  std::vector<std::vector<int>> strata;
};

/// n distinct members drawn uniformly. Throws SamplingError if n > |space|.
SampleSet sample_uniform(const Landscape& landscape, std::size_t n, std::uint64_t seed);

/// Latin hypercube over the landscape's joint representation. Each dimension
/// is cut into n strata that are each used exactly once. A draw that maps to
/// no member (or to one already drawn) is re-jittered inside its strata and
/// has one dimension's stratum swapped with a later sample, which keeps every
/// dimension a permutation. Gives up after `retry_factor * n` rejections.
SampleSet sample_lhs(const Landscape& landscape, std::size_t n, std::uint64_t seed,
                     std::size_t retry_factor = 100);

SampleSet draw_samples(const Landscape& landscape, SampleMethod method, std::size_t n,
                       std::uint64_t seed);

struct Walk {
  std::size_t route_id = 0;
  std::vector<Genotype> genotypes;
  std::vector<double> fitness_series;
  /// Set when the walk stopped early at a member without neighbors.
  bool stuck = false;
};

/// Each step moves to a neighbor of the current point chosen uniformly.
Walk random_walk(const Landscape& landscape, const Genotype& start, std::size_t steps,
                 std::uint64_t seed, std::size_t route_id = 0);

/// `count` routes from uniform random starts. Route r uses its own generator
/// derived from (seed, r); the result does not depend on `jobs`.
std::vector<Walk> random_walks(const Landscape& landscape, std::size_t count, std::size_t steps,
                               std::uint64_t seed, unsigned jobs = 1);

/// Trailing moving average over up to `window` points.
std::vector<double> moving_average(std::span<const double> series, std::size_t window);

/// CSV with columns route_id, step, genotype, fitness. window > 1 smooths
/// the exported fitness column only.
void write_walks_csv(std::ostream& out, std::span<const Walk> walks, std::size_t window = 1);

}  // namespace lfp
