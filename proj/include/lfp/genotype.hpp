#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace lfp {

// Original cell limits and the expanded 17-node layout:
//   0        IN
//   1..15    intermediate slot s in 1..5, operator o in 0..2 at 1 + 3(s-1) + o
//   16       OUT
inline constexpr int kMaxNodes = 7;
inline constexpr int kMaxEdges = 9;
inline constexpr int kMaxSlots = kMaxNodes - 2;
inline constexpr int kOperatorCount = 3;
inline constexpr int kExpandedNodes = 2 + kMaxSlots * kOperatorCount;  // 17
inline constexpr std::size_t kGenotypeBits = kExpandedNodes * kExpandedNodes;  // 289

enum class OperatorLabel : std::uint8_t { conv3x3 = 0, conv1x1 = 1, maxpool3x3 = 2 };

std::string_view to_string(OperatorLabel op);
/// Accepts "conv3x3", "conv1x1", "maxpool3x3" and the "-bn-relu" suffixed forms.
OperatorLabel parse_operator(std::string_view text);

/// Fixed-length bit vector. Ordering is lexicographic over the 0/1 string
/// (bit 0 is the first character), with shorter vectors ordered first.
class Genotype {
 public:
  Genotype() = default;
  explicit Genotype(std::size_t bits);

  static Genotype from_string(std::string_view bits);

  std::size_t size() const noexcept { return size_; }
  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
  void set(std::size_t i, bool value = true);
  void flip(std::size_t i) { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }
  Genotype flipped(std::size_t i) const {
    Genotype g = *this;
    g.flip(i);
    return g;
  }
  std::size_t popcount() const noexcept;
  bool none() const noexcept { return popcount() == 0; }

  std::string to_string() const;
  std::span<const std::uint64_t> words() const noexcept { return words_; }

  friend bool operator==(const Genotype&, const Genotype&) = default;
  friend std::strong_ordering operator<=>(const Genotype& a, const Genotype& b);

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

struct GenotypeHash {
  std::size_t operator()(const Genotype& g) const noexcept;
};

/// Number of differing positions. Throws on length mismatch.
std::size_t hamming(const Genotype& a, const Genotype& b);

/// A DAG cell in its original form: node 0 is IN, node_count-1 is OUT and
/// `ops` labels the intermediate nodes in order.
struct CellSpec {
  int node_count = 2;
  std::vector<std::uint8_t> adjacency;  // row-major node_count x node_count
  std::vector<OperatorLabel> ops;

  CellSpec() = default;
  CellSpec(int nodes, std::vector<OperatorLabel> labels);

  bool edge(int from, int to) const { return adjacency[from * node_count + to] != 0; }
  void set_edge(int from, int to, bool value = true) {
    adjacency[from * node_count + to] = value ? 1 : 0;
  }
  int edge_count() const;

  friend bool operator==(const CellSpec&, const CellSpec&) = default;
};

/// Throws ValidationError naming the first violated invariant.
void validate_cell(const CellSpec& cell);
bool is_valid_cell(const CellSpec& cell);

/// Drops intermediate nodes without edges; the remaining nodes keep their
/// original relative order.
CellSpec canonical(const CellSpec& cell);

Genotype encode_cell(const CellSpec& cell);
/// Throws DecodeError naming the first violated rule.
CellSpec decode_genotype(const Genotype& genotype);

nlohmann::json cell_to_json(const CellSpec& cell);
/// Accepts ops for intermediate nodes only, or the full node list with
/// "input"/"output" at the ends.
CellSpec cell_from_json(const nlohmann::json& j);

}  // namespace lfp

template <>
struct std::hash<lfp::Genotype> : lfp::GenotypeHash {};
