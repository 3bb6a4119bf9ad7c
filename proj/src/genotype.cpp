#include "lfp/genotype.hpp"

#include <algorithm>
#include <array>
#include <bit>

#include "lfp/error.hpp"

namespace lfp {

std::string_view to_string(OperatorLabel op) {
  switch (op) {
    case OperatorLabel::conv3x3: return "conv3x3";
    case OperatorLabel::conv1x1: return "conv1x1";
    case OperatorLabel::maxpool3x3: return "maxpool3x3";
  }
  return "?";
}

OperatorLabel parse_operator(std::string_view text) {
  if (text == "conv3x3" || text == "conv3x3-bn-relu") return OperatorLabel::conv3x3;
  if (text == "conv1x1" || text == "conv1x1-bn-relu") return OperatorLabel::conv1x1;
  if (text == "maxpool3x3") return OperatorLabel::maxpool3x3;
  throw ValidationError("unknown operator '" + std::string(text) + "'");
}

// ---------------------------------------------------------------- Genotype

Genotype::Genotype(std::size_t bits) : size_(bits), words_((bits + 63) / 64, 0) {}

Genotype Genotype::from_string(std::string_view bits) {
  Genotype g(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1') {
      g.set(i);
    } else if (bits[i] != '0') {
      throw ParseError("genotype string must contain only 0/1, got '" +
                       std::string(1, bits[i]) + "' at position " + std::to_string(i));
    }
  }
  return g;
}

void Genotype::set(std::size_t i, bool value) {
  const std::uint64_t mask = std::uint64_t{1} << (i & 63);
  if (value) {
    words_[i >> 6] |= mask;
  } else {
    words_[i >> 6] &= ~mask;
  }
}

std::size_t Genotype::popcount() const noexcept {
  std::size_t total = 0;
  for (auto w : words_) total += static_cast<std::size_t>(std::popcount(w));
  return total;
}

std::string Genotype::to_string() const {
  std::string out(size_, '0');
  for (std::size_t i = 0; i < size_; ++i) {
    if (test(i)) out[i] = '1';
  }
  return out;
}

std::strong_ordering operator<=>(const Genotype& a, const Genotype& b) {
  if (auto c = a.size_ <=> b.size_; c != 0) return c;
  for (std::size_t w = 0; w < a.words_.size(); ++w) {
    const std::uint64_t diff = a.words_[w] ^ b.words_[w];
    if (diff != 0) {
      // The first differing character is the lowest set bit of the xor; the
      // vector holding a 0 there sorts first.
      const std::uint64_t low = diff & (~diff + 1);
      return (a.words_[w] & low) ? std::strong_ordering::greater
                                 : std::strong_ordering::less;
    }
  }
  return std::strong_ordering::equal;
}

std::size_t GenotypeHash::operator()(const Genotype& g) const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ g.size();
  for (auto w : g.words()) {
    h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

std::size_t hamming(const Genotype& a, const Genotype& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::data, "hamming: length mismatch (" + std::to_string(a.size()) +
                                     " vs " + std::to_string(b.size()) + ")");
  }
  std::size_t d = 0;
  const auto wa = a.words();
  const auto wb = b.words();
  for (std::size_t i = 0; i < wa.size(); ++i) {
    d += static_cast<std::size_t>(std::popcount(wa[i] ^ wb[i]));
  }
  return d;
}

// ---------------------------------------------------------------- CellSpec

CellSpec::CellSpec(int nodes, std::vector<OperatorLabel> labels)
    : node_count(nodes),
      adjacency(static_cast<std::size_t>(std::max(nodes, 0) * std::max(nodes, 0)), 0),
      ops(std::move(labels)) {}

int CellSpec::edge_count() const {
  return static_cast<int>(std::count(adjacency.begin(), adjacency.end(), std::uint8_t{1}));
}

namespace {

// Nodes reachable from IN and nodes that reach OUT. Only meaningful for
// upper-triangular adjacency.
struct Reachability {
  std::vector<bool> from_input;
  std::vector<bool> to_output;
};

Reachability reachability(const CellSpec& cell) {
  const int n = cell.node_count;
  Reachability r{std::vector<bool>(n, false), std::vector<bool>(n, false)};
  r.from_input[0] = true;
  for (int v = 1; v < n; ++v) {
    for (int u = 0; u < v; ++u) {
      if (r.from_input[u] && cell.edge(u, v)) {
        r.from_input[v] = true;
        break;
      }
    }
  }
  r.to_output[n - 1] = true;
  for (int u = n - 2; u >= 0; --u) {
    for (int v = u + 1; v < n; ++v) {
      if (r.to_output[v] && cell.edge(u, v)) {
        r.to_output[u] = true;
        break;
      }
    }
  }
  return r;
}

bool has_any_edge(const CellSpec& cell, int node) {
  for (int k = 0; k < cell.node_count; ++k) {
    if (cell.edge(node, k) || cell.edge(k, node)) return true;
  }
  return false;
}

}  // namespace

void validate_cell(const CellSpec& cell) {
  const int n = cell.node_count;
  if (n < 2 || n > kMaxNodes) {
    throw ValidationError("node_count " + std::to_string(n) + " outside [2," +
                          std::to_string(kMaxNodes) + "]");
  }
  if (cell.adjacency.size() != static_cast<std::size_t>(n * n)) {
    throw ValidationError("adjacency is not " + std::to_string(n) + "x" + std::to_string(n));
  }
  if (cell.ops.size() != static_cast<std::size_t>(n - 2)) {
    throw ValidationError("ops length " + std::to_string(cell.ops.size()) + " != node_count-2 (" +
                          std::to_string(n - 2) + ")");
  }
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v <= u; ++v) {
      if (cell.edge(u, v)) {
        throw ValidationError("edge " + std::to_string(u) + "->" + std::to_string(v) +
                              " is not upper-triangular (cycle or self-loop)");
      }
    }
  }
  if (cell.edge_count() > kMaxEdges) {
    throw ValidationError("edge budget exceeded (" + std::to_string(cell.edge_count()) + " > " +
                          std::to_string(kMaxEdges) + ")");
  }
  const Reachability r = reachability(cell);
  if (!r.from_input[n - 1]) throw ValidationError("no IN->OUT connectivity");
  for (int v = 1; v < n - 1; ++v) {
    if (has_any_edge(cell, v) && !(r.from_input[v] && r.to_output[v])) {
      throw ValidationError("node " + std::to_string(v) + " is not on an IN->OUT path");
    }
  }
}

bool is_valid_cell(const CellSpec& cell) {
  try {
    validate_cell(cell);
    return true;
  } catch (const ValidationError&) {
    return false;
  }
}

CellSpec canonical(const CellSpec& cell) {
  validate_cell(cell);
  std::vector<int> keep;
  keep.push_back(0);
  for (int v = 1; v < cell.node_count - 1; ++v) {
    if (has_any_edge(cell, v)) keep.push_back(v);
  }
  keep.push_back(cell.node_count - 1);

  std::vector<OperatorLabel> ops;
  for (std::size_t i = 1; i + 1 < keep.size(); ++i) ops.push_back(cell.ops[keep[i] - 1]);
  CellSpec out(static_cast<int>(keep.size()), std::move(ops));
  for (int a = 0; a < out.node_count; ++a) {
    for (int b = 0; b < out.node_count; ++b) {
      if (cell.edge(keep[a], keep[b])) out.set_edge(a, b);
    }
  }
  return out;
}

namespace {

int expanded_index(const CellSpec& cell, int node) {
  if (node == 0) return 0;
  if (node == cell.node_count - 1) return kExpandedNodes - 1;
  return 1 + kOperatorCount * (node - 1) + static_cast<int>(cell.ops[node - 1]);
}

}  // namespace

Genotype encode_cell(const CellSpec& cell) {
  const CellSpec c = canonical(cell);
  Genotype g(kGenotypeBits);
  for (int u = 0; u < c.node_count; ++u) {
    for (int v = u + 1; v < c.node_count; ++v) {
      if (c.edge(u, v)) {
        g.set(static_cast<std::size_t>(expanded_index(c, u) * kExpandedNodes +
                                       expanded_index(c, v)));
      }
    }
  }
  return g;
}

CellSpec decode_genotype(const Genotype& genotype) {
  if (genotype.size() != kGenotypeBits) {
    throw DecodeError("length " + std::to_string(genotype.size()) + " != " +
                      std::to_string(kGenotypeBits));
  }
  constexpr int out_node = kExpandedNodes - 1;
  auto bit = [&](int r, int c) {
    return genotype.test(static_cast<std::size_t>(r * kExpandedNodes + c));
  };

  for (int i = 0; i < kExpandedNodes; ++i) {
    if (bit(i, i)) throw DecodeError("self-loop on expanded node " + std::to_string(i));
    if (bit(i, 0)) throw DecodeError("edge into IN from expanded node " + std::to_string(i));
    if (bit(out_node, i)) throw DecodeError("edge out of OUT to expanded node " + std::to_string(i));
  }

  // Which operator copy each slot uses, or -1 if the slot is empty.
  std::array<int, kMaxSlots + 1> slot_op{};
  slot_op.fill(-1);
  for (int s = 1; s <= kMaxSlots; ++s) {
    for (int o = 0; o < kOperatorCount; ++o) {
      const int idx = 1 + kOperatorCount * (s - 1) + o;
      bool touched = false;
      for (int k = 0; k < kExpandedNodes && !touched; ++k) touched = bit(idx, k) || bit(k, idx);
      if (!touched) continue;
      if (slot_op[s] != -1) {
        throw DecodeError("ambiguous operator in slot " + std::to_string(s) + " (copies " +
                          std::to_string(slot_op[s]) + " and " + std::to_string(o) + ")");
      }
      slot_op[s] = o;
    }
  }

  // Expanded index -> position in slot order (IN = 0, slots 1..5, OUT = 6).
  auto order = [](int idx) {
    if (idx == 0) return 0;
    if (idx == out_node) return kMaxSlots + 1;
    return 1 + (idx - 1) / kOperatorCount;
  };
  int edges = 0;
  for (int r = 0; r < kExpandedNodes; ++r) {
    for (int c = 0; c < kExpandedNodes; ++c) {
      if (!bit(r, c)) continue;
      if (order(r) >= order(c)) {
        throw DecodeError("cyclic or backward edge between expanded nodes " + std::to_string(r) +
                          " and " + std::to_string(c));
      }
      ++edges;
    }
  }

  int used = 0;
  for (int s = 1; s <= kMaxSlots; ++s) {
    if (slot_op[s] == -1) continue;
    if (s != used + 1) throw DecodeError("non-canonical slot gap before slot " + std::to_string(s));
    ++used;
  }
  if (edges > kMaxEdges) {
    throw DecodeError("edge budget exceeded (" + std::to_string(edges) + " > " +
                      std::to_string(kMaxEdges) + ")");
  }

  std::vector<OperatorLabel> ops;
  for (int s = 1; s <= used; ++s) ops.push_back(static_cast<OperatorLabel>(slot_op[s]));
  CellSpec cell(used + 2, std::move(ops));
  auto node_of = [&](int idx) { return idx == out_node ? used + 1 : order(idx); };
  for (int r = 0; r < kExpandedNodes; ++r) {
    for (int c = 0; c < kExpandedNodes; ++c) {
      if (bit(r, c)) cell.set_edge(node_of(r), node_of(c));
    }
  }
  try {
    validate_cell(cell);
  } catch (const ValidationError& e) {
    throw DecodeError(e.what());
  }
  return cell;
}

nlohmann::json cell_to_json(const CellSpec& cell) {
  nlohmann::json adj = nlohmann::json::array();
  for (int u = 0; u < cell.node_count; ++u) {
    nlohmann::json row = nlohmann::json::array();
    for (int v = 0; v < cell.node_count; ++v) row.push_back(cell.edge(u, v) ? 1 : 0);
    adj.push_back(std::move(row));
  }
  nlohmann::json ops = nlohmann::json::array();
  for (auto op : cell.ops) ops.push_back(std::string(to_string(op)));
  return {{"adjacency", std::move(adj)}, {"ops", std::move(ops)}};
}

CellSpec cell_from_json(const nlohmann::json& j) {
  if (!j.contains("adjacency") || !j.at("adjacency").is_array()) {
    throw ValidationError("missing \"adjacency\" array");
  }
  if (!j.contains("ops") || !j.at("ops").is_array()) throw ValidationError("missing \"ops\" array");
  const auto& adj = j.at("adjacency");
  const int n = static_cast<int>(adj.size());
  if (n < 2 || n > kMaxNodes) {
    throw ValidationError("node_count " + std::to_string(n) + " outside [2," +
                          std::to_string(kMaxNodes) + "]");
  }

  std::vector<std::string> names;
  for (const auto& op : j.at("ops")) names.push_back(op.get<std::string>());
  if (names.size() == static_cast<std::size_t>(n) && names.front() == "input" &&
      names.back() == "output") {
    names = std::vector<std::string>(names.begin() + 1, names.end() - 1);
  }
  std::vector<OperatorLabel> ops;
  for (const auto& name : names) ops.push_back(parse_operator(name));

  CellSpec cell(n, std::move(ops));
  for (int u = 0; u < n; ++u) {
    const auto& row = adj.at(u);
    if (!row.is_array() || static_cast<int>(row.size()) != n) {
      throw ValidationError("adjacency row " + std::to_string(u) + " has wrong length");
    }
    for (int v = 0; v < n; ++v) {
      const int value = row.at(v).get<int>();
      if (value != 0 && value != 1) throw ValidationError("adjacency entries must be 0/1");
      cell.set_edge(u, v, value == 1);
    }
  }
  validate_cell(cell);
  return cell;
}

}  // namespace lfp
