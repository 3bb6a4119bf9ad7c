#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "lfp/benchmark.hpp"
#include "lfp/error.hpp"
#include "lfp/sampling.hpp"

using namespace lfp;

TEST_CASE("a full-size uniform draw returns the whole space") {
  const NKLandscape nk({4, 1, 3});
  const SampleSet s = sample_uniform(nk, 16, 5);
  const std::set<Genotype> got(s.genotypes.begin(), s.genotypes.end());
  CHECK(got.size() == 16);
  CHECK_THROWS_AS(sample_uniform(nk, 17, 5), SamplingError);
  CHECK_THROWS_AS(sample_uniform(nk, 0, 5), SamplingError);
}

TEST_CASE("draws are deterministic per seed") {
  const NKLandscape nk({20, 2, 1});
  for (auto method : {SampleMethod::uniform, SampleMethod::lhs}) {
    const auto a = draw_samples(nk, method, 50, 77);
    const auto b = draw_samples(nk, method, 50, 77);
    const auto c = draw_samples(nk, method, 50, 78);
    CHECK(a.genotypes == b.genotypes);
    CHECK(a.genotypes != c.genotypes);
  }
}

TEST_CASE("uniform bits are balanced") {
  for (int n : {10, 30}) {
    const NKLandscape nk({n, 0, 1});
    const auto s = sample_uniform(nk, 1000, 4);
    for (std::size_t bit = 0; bit < static_cast<std::size_t>(n); ++bit) {
      std::size_t ones = 0;
      for (const auto& g : s.genotypes) ones += g.test(bit);
      const double freq = static_cast<double>(ones) / 1000.0;
      CHECK(freq > 0.45);
      CHECK(freq < 0.55);
    }
  }
}

TEST_CASE("two LHS samples take each binary value once") {
  const NKLandscape nk({16, 1, 2});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = sample_lhs(nk, 2, seed);
    REQUIRE(s.genotypes.size() == 2);
    for (std::size_t bit = 0; bit < 16; ++bit) CHECK(s.genotypes[0].test(bit) != s.genotypes[1].test(bit));
  }
}

TEST_CASE("LHS strata form a permutation in every dimension") {
  const NKLandscape nk({12, 2, 9});
  const std::size_t n = 200;
  const auto s = sample_lhs(nk, n, 31);
  REQUIRE(s.strata.size() == n);
  for (std::size_t d = 0; d < 12; ++d) {
    std::vector<int> col;
    for (const auto& row : s.strata) col.push_back(row[d]);
    std::sort(col.begin(), col.end());
    for (std::size_t i = 0; i < n; ++i) CHECK(col[i] == static_cast<int>(i));
    // stratum i of n covers [i/n, (i+1)/n), so the level is 0 in the lower half
    for (std::size_t i = 0; i < n; ++i) {
      const bool upper = s.strata[i][d] >= static_cast<int>(n / 2);
      CHECK(s.genotypes[i].test(d) == upper);
    }
  }
  const std::set<Genotype> distinct(s.genotypes.begin(), s.genotypes.end());
  CHECK(distinct.size() == n);
}

TEST_CASE("LHS on a cell table returns distinct members") {
  std::string text;
  // every 3-node cell with the IN->OUT edge plus one with a path through the middle
  const char* ops[] = {"conv3x3", "conv1x1", "maxpool3x3"};
  int id = 0;
  for (const char* op : ops) {
    for (int skip = 0; skip < 2; ++skip) {
      ++id;
      text += "{\"id\":\"m" + std::to_string(id) + "\",\"adjacency\":[[0,1," + std::to_string(skip) +
              "],[0,0,1],[0,0,0]],\"ops\":[\"" + op + "\"],\"runs\":[{\"split\":\"test\",\"epoch\":36," +
              "\"metric\":\"acc\",\"value\":0." + std::to_string(id) + "}]}\n";
    }
  }
  text += R"({"id":"direct","adjacency":[[0,1],[0,0]],"ops":[],"runs":[{"split":"test","epoch":36,"metric":"acc","value":0.05}]})";
  std::istringstream in(text);
  auto table = std::make_shared<const FitnessTable>(parse_table(in, "cells"));
  const TabularLandscape land(table, {Split::test, 36, "acc"});
  CHECK(land.lhs_levels() == std::vector<int>{2, 2, 2, 3});
  // Only one member has no IN->node1 edge, so at most one sample may take
  // the lower stratum of that dimension; three samples leave room for it.
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto s = sample_lhs(land, 3, seed);
    const std::set<Genotype> distinct(s.genotypes.begin(), s.genotypes.end());
    CHECK(distinct.size() == 3);
    for (const auto& g : s.genotypes) CHECK(land.contains(g));
  }
  const auto s = sample_lhs(land, 3, 3);
  for (const auto& g : s.genotypes) CHECK(land.contains(g));
}

TEST_CASE("walks are Hamming-1 chains of members") {
  const NKLandscape nk({14, 3, 2});
  const auto walks = random_walks(nk, 8, 60, 10, 3);
  REQUIRE(walks.size() == 8);
  for (std::size_t r = 0; r < walks.size(); ++r) {
    const auto& w = walks[r];
    CHECK(w.route_id == r);
    CHECK(w.genotypes.size() == 61);
    CHECK_FALSE(w.stuck);
    for (std::size_t s = 1; s < w.genotypes.size(); ++s) CHECK(hamming(w.genotypes[s - 1], w.genotypes[s]) == 1);
    for (std::size_t s = 0; s < w.genotypes.size(); ++s) CHECK(w.fitness_series[s] == nk.fitness(w.genotypes[s]));
  }
  CHECK(random_walks(nk, 8, 60, 10, 1).front().genotypes == walks.front().genotypes);
}

TEST_CASE("walk steps are uniform over the neighborhood") {
  const NKLandscape nk({10, 1, 1});
  const Genotype start(10);
  std::map<Genotype, int> counts;
  const int draws = 10000;
  for (int t = 0; t < draws; ++t) counts[random_walk(nk, start, 1, static_cast<std::uint64_t>(t)).genotypes[1]]++;
  CHECK(counts.size() == 10);
  double chi2 = 0.0;
  const double expected = draws / 10.0;
  for (const auto& [g, c] : counts) chi2 += (c - expected) * (c - expected) / expected;
  CHECK(chi2 < 21.67);  // 9 dof, p = 0.01
}

TEST_CASE("a walk stops at an isolated member") {
  const std::string text = R"({"id":"a","genotype":"000","runs":[{"split":"test","epoch":1,"metric":"m","value":0.1}]}
{"id":"b","genotype":"111","runs":[{"split":"test","epoch":1,"metric":"m","value":0.2}]})";
  std::istringstream in(text);
  auto table = std::make_shared<const FitnessTable>(parse_table(in, "iso"));
  const TabularLandscape land(table, {Split::test, 1, "m"});
  const Walk w = random_walk(land, Genotype::from_string("000"), 10, 1);
  CHECK(w.stuck);
  CHECK(w.genotypes.size() == 1);
  CHECK_THROWS_AS(random_walk(land, Genotype::from_string("010"), 10, 1), LookupError);
}

TEST_CASE("moving average and csv export") {
  const std::vector<double> xs{1, 2, 3, 4, 5};
  const auto ma = moving_average(xs, 3);
  CHECK(ma == std::vector<double>{1, 1.5, 2, 3, 4});
  CHECK(moving_average(xs, 1) == xs);

  Walk w;
  w.route_id = 4;
  w.genotypes = {Genotype::from_string("01"), Genotype::from_string("11")};
  w.fitness_series = {0.25, 0.75};
  std::ostringstream out;
  write_walks_csv(out, std::span<const Walk>(&w, 1), 5);
  CHECK(out.str() == "route_id,step,genotype,fitness\n4,0,01,0.25\n4,1,11,0.5\n");
}
