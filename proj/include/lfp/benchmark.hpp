#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "lfp/genotype.hpp"
#include "lfp/rng.hpp"

namespace lfp {

enum class Split : std::uint8_t { train = 0, validation = 1, test = 2 };

std::string_view to_string(Split split);
Split parse_split(std::string_view text);

enum class Direction : std::uint8_t { minimize, maximize };

/// True if `a` is strictly better than `b` in the search direction.
inline bool strictly_better(double a, double b, Direction dir) {
  return dir == Direction::maximize ? a > b : a < b;
}

struct FitnessQuery {
  Split split = Split::test;
  int epoch = 36;
  std::string metric;
};

/// How table genotypes were produced.
enum class GenotypeEncoding : std::uint8_t {
  cell,       // 289-bit expanded cell encoding; records carry a CellSpec
  bitstring,  // raw bit vectors of arbitrary fixed length (synthetic landscapes)
};

struct Measurement {
  Split split;
  int epoch;
  std::string metric;
  double value;
  friend bool operator==(const Measurement&, const Measurement&) = default;
};

struct FitnessRecord {
  std::string id;
  Genotype genotype;
  std::optional<CellSpec> cell;
  /// One entry per run; each run lists its measurements.
  std::vector<std::vector<Measurement>> runs;

  friend bool operator==(const FitnessRecord&, const FitnessRecord&) = default;
};

/// Genotype -> fitness over the advertised (split, epoch, metric) grid.
/// Immutable after construction; aggregates are arithmetic means over runs.
class FitnessTable {
 public:
  FitnessTable(std::string dataset_name, std::vector<FitnessRecord> records);

  const std::string& dataset_name() const { return dataset_name_; }
  GenotypeEncoding encoding() const { return encoding_; }
  std::size_t genotype_bits() const { return genotype_bits_; }
  std::size_t size() const { return records_.size(); }
  std::span<const FitnessRecord> records() const { return records_; }

  const std::vector<int>& epochs() const { return epochs_; }
  const std::vector<Split>& splits() const { return splits_; }
  const std::vector<std::string>& metrics() const { return metrics_; }

  bool contains(const Genotype& g) const { return index_.count(g) != 0; }
  /// Index into the grid of aggregated values; throws LookupError for an
  /// unadvertised triple.
  std::size_t column(const FitnessQuery& query) const;
  double fitness(const Genotype& g, std::size_t column) const;
  double fitness(const Genotype& g, const FitnessQuery& query) const {
    return fitness(g, column(query));
  }
  /// Position of g in records(); throws LookupError if absent.
  std::size_t record_index(const Genotype& g) const;

  /// Largest original node count among cell records (2 for bitstring tables).
  int max_cell_nodes() const { return max_cell_nodes_; }

  friend bool operator==(const FitnessTable& a, const FitnessTable& b) {
    return a.dataset_name_ == b.dataset_name_ && a.records_ == b.records_;
  }

 private:
  std::string dataset_name_;
  std::vector<FitnessRecord> records_;
  std::unordered_map<Genotype, std::size_t, GenotypeHash> index_;
  GenotypeEncoding encoding_ = GenotypeEncoding::cell;
  std::size_t genotype_bits_ = 0;
  int max_cell_nodes_ = 2;
  std::vector<int> epochs_;
  std::vector<Split> splits_;
  std::vector<std::string> metrics_;
  std::vector<double> means_;  // records x columns
};

/// Reads the benchmark JSONL format. Records sharing a genotype are merged
/// as additional runs.
FitnessTable load_table(const std::filesystem::path& path, std::string dataset_name = {});
FitnessTable parse_table(std::istream& in, std::string dataset_name);
void write_table(const FitnessTable& table, std::ostream& out);
void write_table(const FitnessTable& table, const std::filesystem::path& path);

/// The triplet (space, fitness, neighborhood) with the hooks samplers need.
class Landscape {
 public:
  virtual ~Landscape() = default;

  virtual std::string name() const = 0;
  virtual std::size_t genotype_bits() const = 0;
  virtual double fitness(const Genotype& x) const = 0;
  virtual bool contains(const Genotype& x) const = 0;
  /// |space| when it fits in 64 bits.
  virtual std::optional<std::uint64_t> size() const = 0;
  /// Every member in ascending order; throws CapacityError above `cap`.
  virtual std::vector<Genotype> enumerate(std::uint64_t cap) const = 0;
  virtual Genotype random_member(Rng& rng) const = 0;

  /// Level count per dimension of the joint representation used for LHS.
  virtual std::vector<int> lhs_levels() const = 0;
  /// Maps a point of the joint representation to a member, if valid.
  virtual std::optional<Genotype> from_lhs_point(std::span<const int> levels) const = 0;

  /// Hamming-1 members, ascending, excluding x.
  virtual std::vector<Genotype> neighbors(const Genotype& x) const;
};

inline std::vector<Genotype> neighbors(const Genotype& x, const Landscape& landscape) {
  return landscape.neighbors(x);
}

/// Table members under one fitness query. Neighbors are single-bit flips
/// that land on another table member.
class TabularLandscape final : public Landscape {
 public:
  TabularLandscape(std::shared_ptr<const FitnessTable> table, const FitnessQuery& query);

  const FitnessTable& table() const { return *table_; }
  const FitnessQuery& query() const { return query_; }

  std::string name() const override { return table_->dataset_name(); }
  std::size_t genotype_bits() const override { return table_->genotype_bits(); }
  double fitness(const Genotype& x) const override { return table_->fitness(x, column_); }
  bool contains(const Genotype& x) const override { return table_->contains(x); }
  std::optional<std::uint64_t> size() const override { return table_->size(); }
  std::vector<Genotype> enumerate(std::uint64_t cap) const override;
  Genotype random_member(Rng& rng) const override;
  std::vector<int> lhs_levels() const override;
  std::optional<Genotype> from_lhs_point(std::span<const int> levels) const override;

 private:
  std::shared_ptr<const FitnessTable> table_;
  FitnessQuery query_;
  std::size_t column_;
};

struct NKSpec {
  int n = 10;
  int k = 0;
  std::uint64_t seed = 0;
};

/// NK landscape: locus i interacts with loci i+1..i+k (mod n). Contribution
/// tables are never stored; entries are hashed from (seed, locus, pattern).
class NKLandscape final : public Landscape {
 public:
  explicit NKLandscape(const NKSpec& spec);

  const NKSpec& spec() const { return spec_; }
  double contribution(int locus, std::uint64_t pattern) const;

  std::string name() const override;
  std::size_t genotype_bits() const override { return static_cast<std::size_t>(spec_.n); }
  double fitness(const Genotype& x) const override;
  bool contains(const Genotype& x) const override { return x.size() == genotype_bits(); }
  std::optional<std::uint64_t> size() const override;
  std::vector<Genotype> enumerate(std::uint64_t cap) const override;
  Genotype random_member(Rng& rng) const override;
  std::vector<int> lhs_levels() const override;
  std::optional<Genotype> from_lhs_point(std::span<const int> levels) const override;
  std::vector<Genotype> neighbors(const Genotype& x) const override;

 private:
  NKSpec spec_;
};

NKLandscape generate_nk(const NKSpec& spec);

/// Genotype for the integer `value` (bit i of value -> position i).
Genotype genotype_from_index(std::uint64_t value, std::size_t bits);

inline constexpr std::uint64_t kDefaultEnumerationCap = std::uint64_t{1} << 20;

struct OptimaEnumeration {
  std::size_t count = 0;
  std::vector<Genotype> optima;  // ascending
};

/// Exact strict local optima: f(x) strictly better than every neighbor.
/// Members without neighbors qualify vacuously.
OptimaEnumeration enumerate_optima_exhaustive(const Landscape& landscape, Direction direction,
                                              std::uint64_t cap = kDefaultEnumerationCap);

/// Materializes an enumerable landscape as a bitstring table with one run at
/// each listed epoch. With noise > 0, each (genotype, epoch) value gets a
/// deterministic uniform perturbation in [-noise, noise], clamped to [0,1].
FitnessTable table_from_landscape(const Landscape& landscape, std::span<const int> epochs,
                                  Split split, const std::string& metric, double noise = 0.0,
                                  std::uint64_t noise_seed = 0,
                                  std::uint64_t cap = kDefaultEnumerationCap);

}  // namespace lfp
