#include "lfp/benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "lfp/error.hpp"

namespace lfp {

std::string_view to_string(Split split) {
  switch (split) {
    case Split::train: return "train";
    case Split::validation: return "validation";
    case Split::test: return "test";
  }
  return "?";
}

Split parse_split(std::string_view text) {
  if (text == "train") return Split::train;
  if (text == "validation" || text == "valid") return Split::validation;
  if (text == "test") return Split::test;
  throw Error(ErrorKind::usage, "unknown split '" + std::string(text) + "'");
}

// ------------------------------------------------------------ FitnessTable

FitnessTable::FitnessTable(std::string dataset_name, std::vector<FitnessRecord> records)
    : dataset_name_(std::move(dataset_name)), records_(std::move(records)) {
  if (records_.empty()) throw Error(ErrorKind::data, "empty table: analyses need at least one record");

  genotype_bits_ = records_.front().genotype.size();
  bool all_cells = true;
  std::set<int> epochs;
  std::set<Split> splits;
  std::set<std::string> metrics;
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& r = records_[i];
    if (r.genotype.size() != genotype_bits_) {
      throw Error(ErrorKind::data, "record '" + r.id + "': genotype length " +
                                       std::to_string(r.genotype.size()) + " != " +
                                       std::to_string(genotype_bits_));
    }
    if (!index_.emplace(r.genotype, i).second) {
      throw Error(ErrorKind::data, "record '" + r.id + "': duplicate genotype");
    }
    if (r.runs.empty()) throw Error(ErrorKind::data, "record '" + r.id + "': no runs");
    if (r.cell) {
      max_cell_nodes_ = std::max(max_cell_nodes_, r.cell->node_count);
    } else {
      all_cells = false;
    }
    for (const auto& run : r.runs) {
      for (const auto& m : run) {
        if (!std::isfinite(m.value) || m.value < 0.0 || m.value > 1.0) {
          throw Error(ErrorKind::data, "record '" + r.id + "': value " + std::to_string(m.value) +
                                           " outside [0,1]");
        }
        epochs.insert(m.epoch);
        splits.insert(m.split);
        metrics.insert(m.metric);
      }
    }
  }
  encoding_ = all_cells ? GenotypeEncoding::cell : GenotypeEncoding::bitstring;
  if (!all_cells) max_cell_nodes_ = 2;
  epochs_.assign(epochs.begin(), epochs.end());
  splits_.assign(splits.begin(), splits.end());
  metrics_.assign(metrics.begin(), metrics.end());

  const std::size_t columns = epochs_.size() * splits_.size() * metrics_.size();
  means_.assign(records_.size() * columns, 0.0);
  std::vector<int> counts(columns);
  for (std::size_t i = 0; i < records_.size(); ++i) {
    std::fill(counts.begin(), counts.end(), 0);
    double* row = &means_[i * columns];
    for (const auto& run : records_[i].runs) {
      for (const auto& m : run) {
        const std::size_t c = column({m.split, m.epoch, m.metric});
        row[c] += m.value;
        ++counts[c];
      }
    }
    for (std::size_t c = 0; c < columns; ++c) {
      if (counts[c] == 0) {
        const std::size_t metric = c % metrics_.size();
        const std::size_t epoch = (c / metrics_.size()) % epochs_.size();
        const std::size_t split = c / (metrics_.size() * epochs_.size());
        throw Error(ErrorKind::data,
                    "record '" + records_[i].id + "': missing value for (" +
                        std::string(to_string(splits_[split])) + ", " +
                        std::to_string(epochs_[epoch]) + ", " + metrics_[metric] + ")");
      }
      row[c] /= counts[c];
    }
  }
}

std::size_t FitnessTable::column(const FitnessQuery& query) const {
  const auto s = std::find(splits_.begin(), splits_.end(), query.split);
  const auto e = std::find(epochs_.begin(), epochs_.end(), query.epoch);
  const auto m = std::find(metrics_.begin(), metrics_.end(), query.metric);
  if (s == splits_.end() || e == epochs_.end() || m == metrics_.end()) {
    throw LookupError("query (" + std::string(to_string(query.split)) + ", " +
                      std::to_string(query.epoch) + ", " + query.metric +
                      ") is not advertised by table '" + dataset_name_ + "'");
  }
  return (static_cast<std::size_t>(s - splits_.begin()) * epochs_.size() +
          static_cast<std::size_t>(e - epochs_.begin())) *
             metrics_.size() +
         static_cast<std::size_t>(m - metrics_.begin());
}

std::size_t FitnessTable::record_index(const Genotype& g) const {
  const auto it = index_.find(g);
  if (it == index_.end()) throw LookupError("genotype not in table '" + dataset_name_ + "'");
  return it->second;
}

double FitnessTable::fitness(const Genotype& g, std::size_t column) const {
  const std::size_t columns = epochs_.size() * splits_.size() * metrics_.size();
  return means_[record_index(g) * columns + column];
}

// ------------------------------------------------------------------- JSONL

namespace {

struct PendingRecord {
  std::string id;
  Genotype genotype;
  std::optional<CellSpec> cell;
  std::vector<std::vector<Measurement>> runs;
};

std::vector<std::vector<Measurement>> parse_runs(const nlohmann::json& runs) {
  if (!runs.is_array()) throw std::invalid_argument("\"runs\" must be an array");
  std::vector<std::vector<Measurement>> grouped;
  std::map<std::tuple<Split, int, std::string>, std::size_t> occurrences;
  for (const auto& entry : runs) {
    Measurement m{parse_split(entry.at("split").get<std::string>()), entry.at("epoch").get<int>(),
                  entry.at("metric").get<std::string>(), entry.at("value").get<double>()};
    std::size_t run = 0;
    if (entry.contains("run")) {
      run = entry.at("run").get<std::size_t>();
    } else {
      run = occurrences[{m.split, m.epoch, m.metric}]++;
    }
    if (grouped.size() <= run) grouped.resize(run + 1);
    grouped[run].push_back(std::move(m));
  }
  std::erase_if(grouped, [](const auto& r) { return r.empty(); });
  return grouped;
}

}  // namespace

FitnessTable parse_table(std::istream& in, std::string dataset_name) {
  std::vector<PendingRecord> pending;
  std::unordered_map<Genotype, std::size_t, GenotypeHash> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(line_no);
    PendingRecord rec;
    try {
      const auto j = nlohmann::json::parse(line);
      if (!j.is_object()) throw std::invalid_argument("record must be a JSON object");
      rec.id = j.contains("id") ? j.at("id").get<std::string>() : where;
      if (j.contains("adjacency")) {
        rec.cell = canonical(cell_from_json(j));
        rec.genotype = encode_cell(*rec.cell);
      } else if (j.contains("genotype")) {
        rec.genotype = Genotype::from_string(j.at("genotype").get<std::string>());
        if (rec.genotype.size() == kGenotypeBits) {
          try {
            rec.cell = decode_genotype(rec.genotype);
          } catch (const DecodeError&) {
          }
        }
      } else {
        throw std::invalid_argument("record needs \"adjacency\"/\"ops\" or \"genotype\"");
      }
      if (!j.contains("runs")) throw std::invalid_argument("missing \"runs\"");
      rec.runs = parse_runs(j.at("runs"));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(where + ": " + e.what());
    } catch (const Error& e) {
      throw ParseError(where + ": " + e.what());
    } catch (const std::exception& e) {
      throw ParseError(where + ": " + e.what());
    }

    if (auto it = seen.find(rec.genotype); it != seen.end()) {
      auto& target = pending[it->second].runs;
      target.insert(target.end(), rec.runs.begin(), rec.runs.end());
    } else {
      seen.emplace(rec.genotype, pending.size());
      pending.push_back(std::move(rec));
    }
  }

  std::vector<FitnessRecord> records;
  records.reserve(pending.size());
  for (auto& p : pending) {
    records.push_back({std::move(p.id), std::move(p.genotype), std::move(p.cell), std::move(p.runs)});
  }
  return FitnessTable(std::move(dataset_name), std::move(records));
}

FitnessTable load_table(const std::filesystem::path& path, std::string dataset_name) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::data, "cannot open table '" + path.string() + "'");
  if (dataset_name.empty()) dataset_name = path.stem().string();
  try {
    return parse_table(in, std::move(dataset_name));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_table(const FitnessTable& table, std::ostream& out) {
  for (const auto& r : table.records()) {
    nlohmann::ordered_json j;
    j["id"] = r.id;
    if (r.cell && table.encoding() == GenotypeEncoding::cell) {
      const auto cell = cell_to_json(*r.cell);
      j["adjacency"] = cell.at("adjacency");
      j["ops"] = cell.at("ops");
    } else {
      j["genotype"] = r.genotype.to_string();
    }
    nlohmann::ordered_json runs = nlohmann::ordered_json::array();
    for (std::size_t run = 0; run < r.runs.size(); ++run) {
      for (const auto& m : r.runs[run]) {
        runs.push_back({{"split", std::string(to_string(m.split))},
                        {"epoch", m.epoch},
                        {"metric", m.metric},
                        {"value", m.value},
                        {"run", run}});
      }
    }
    j["runs"] = std::move(runs);
    out << j.dump() << '\n';
  }
}

void write_table(const FitnessTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::data, "cannot write table '" + path.string() + "'");
  write_table(table, out);
}

// -------------------------------------------------------------- Landscapes

std::vector<Genotype> Landscape::neighbors(const Genotype& x) const {
  std::vector<Genotype> out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    Genotype y = x.flipped(i);
    if (contains(y)) out.push_back(std::move(y));
  }
  std::sort(out.begin(), out.end());
  return out;
}

TabularLandscape::TabularLandscape(std::shared_ptr<const FitnessTable> table,
                                   const FitnessQuery& query)
    : table_(std::move(table)), query_(query), column_(table_->column(query)) {}

std::vector<Genotype> TabularLandscape::enumerate(std::uint64_t cap) const {
  if (table_->size() > cap) {
    throw CapacityError("table has " + std::to_string(table_->size()) +
                        " members, above the enumeration cap " + std::to_string(cap));
  }
  std::vector<Genotype> all;
  all.reserve(table_->size());
  for (const auto& r : table_->records()) all.push_back(r.genotype);
  std::sort(all.begin(), all.end());
  return all;
}

Genotype TabularLandscape::random_member(Rng& rng) const {
  return table_->records()[rng.index(table_->size())].genotype;
}

std::vector<int> TabularLandscape::lhs_levels() const {
  if (table_->encoding() == GenotypeEncoding::bitstring) {
    return std::vector<int>(table_->genotype_bits(), 2);
  }
  const int m = table_->max_cell_nodes();
  std::vector<int> levels(static_cast<std::size_t>(m * (m - 1) / 2), 2);
  levels.insert(levels.end(), static_cast<std::size_t>(m - 2), kOperatorCount);
  return levels;
}

std::optional<Genotype> TabularLandscape::from_lhs_point(std::span<const int> levels) const {
  if (table_->encoding() == GenotypeEncoding::bitstring) {
    Genotype g(levels.size());
    for (std::size_t i = 0; i < levels.size(); ++i) g.set(i, levels[i] != 0);
    if (!table_->contains(g)) return std::nullopt;
    return g;
  }

  // Upper-triangular entries row by row, then one operator per intermediate.
  const int m = table_->max_cell_nodes();
  const std::size_t pairs = static_cast<std::size_t>(m * (m - 1) / 2);
  std::vector<OperatorLabel> ops;
  for (std::size_t i = pairs; i < levels.size(); ++i) ops.push_back(static_cast<OperatorLabel>(levels[i]));
  CellSpec cell(m, std::move(ops));
  std::size_t d = 0;
  for (int u = 0; u < m; ++u) {
    for (int v = u + 1; v < m; ++v) cell.set_edge(u, v, levels[d++] != 0);
  }

  // Drop edges of intermediate nodes that lie on no IN->OUT path.
  std::vector<bool> from_in(m, false), to_out(m, false);
  from_in[0] = true;
  for (int v = 1; v < m; ++v)
    for (int u = 0; u < v && !from_in[v]; ++u) from_in[v] = from_in[u] && cell.edge(u, v);
  to_out[m - 1] = true;
  for (int u = m - 2; u >= 0; --u)
    for (int v = u + 1; v < m && !to_out[u]; ++v) to_out[u] = to_out[v] && cell.edge(u, v);
  for (int v = 1; v < m - 1; ++v) {
    if (from_in[v] && to_out[v]) continue;
    for (int k = 0; k < m; ++k) {
      cell.set_edge(v, k, false);
      cell.set_edge(k, v, false);
    }
  }
  if (!is_valid_cell(cell)) return std::nullopt;
  Genotype g = encode_cell(cell);
  if (!table_->contains(g)) return std::nullopt;
  return g;
}

// ---------------------------------------------------------------------- NK

NKLandscape::NKLandscape(const NKSpec& spec) : spec_(spec) {
  if (spec.n < 1 || spec.n > 64) {
    throw Error(ErrorKind::usage, "NK: n must be in [1,64], got " + std::to_string(spec.n));
  }
  if (spec.k < 0 || spec.k >= spec.n) {
    throw Error(ErrorKind::usage, "NK: k must satisfy 0 <= k <= n-1 (n=" + std::to_string(spec.n) +
                                      ", k=" + std::to_string(spec.k) + ")");
  }
}

NKLandscape generate_nk(const NKSpec& spec) { return NKLandscape(spec); }

std::string NKLandscape::name() const {
  return "nk-n" + std::to_string(spec_.n) + "-k" + std::to_string(spec_.k) + "-s" +
         std::to_string(spec_.seed);
}

double NKLandscape::contribution(int locus, std::uint64_t pattern) const {
  const std::uint64_t h =
      splitmix64(derive_seed(spec_.seed, static_cast<std::uint64_t>(locus)) ^ splitmix64(pattern));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double NKLandscape::fitness(const Genotype& x) const {
  if (x.size() != genotype_bits()) {
    throw LookupError("NK: genotype length " + std::to_string(x.size()) + " != n=" +
                      std::to_string(spec_.n));
  }
  double total = 0.0;
  for (int i = 0; i < spec_.n; ++i) {
    std::uint64_t pattern = 0;
    for (int j = 0; j <= spec_.k; ++j) {
      if (x.test(static_cast<std::size_t>((i + j) % spec_.n))) pattern |= std::uint64_t{1} << j;
    }
    total += contribution(i, pattern);
  }
  return total / spec_.n;
}

std::optional<std::uint64_t> NKLandscape::size() const {
  if (spec_.n >= 64) return std::nullopt;
  return std::uint64_t{1} << spec_.n;
}

Genotype genotype_from_index(std::uint64_t value, std::size_t bits) {
  Genotype g(bits);
  for (std::size_t i = 0; i < bits && i < 64; ++i) g.set(i, (value >> i) & 1u);
  return g;
}

std::vector<Genotype> NKLandscape::enumerate(std::uint64_t cap) const {
  const auto total = size();
  if (!total || *total > cap) {
    throw CapacityError("NK space 2^" + std::to_string(spec_.n) +
                        " exceeds the enumeration cap " + std::to_string(cap));
  }
  std::vector<Genotype> all;
  all.reserve(*total);
  for (std::uint64_t v = 0; v < *total; ++v) all.push_back(genotype_from_index(v, genotype_bits()));
  std::sort(all.begin(), all.end());
  return all;
}

Genotype NKLandscape::random_member(Rng& rng) const {
  Genotype g(genotype_bits());
  for (std::size_t i = 0; i < g.size(); ++i) g.set(i, rng.next() >> 63);
  return g;
}

std::vector<int> NKLandscape::lhs_levels() const { return std::vector<int>(genotype_bits(), 2); }

std::optional<Genotype> NKLandscape::from_lhs_point(std::span<const int> levels) const {
  if (levels.size() != genotype_bits()) return std::nullopt;
  Genotype g(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) g.set(i, levels[i] != 0);
  return g;
}

std::vector<Genotype> NKLandscape::neighbors(const Genotype& x) const {
  std::vector<Genotype> out;
  out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out.push_back(x.flipped(i));
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------- Optima

OptimaEnumeration enumerate_optima_exhaustive(const Landscape& landscape, Direction direction,
                                              std::uint64_t cap) {
  OptimaEnumeration result;
  for (const auto& x : landscape.enumerate(cap)) {
    const double fx = landscape.fitness(x);
    bool optimum = true;
    for (const auto& y : landscape.neighbors(x)) {
      if (!strictly_better(fx, landscape.fitness(y), direction)) {
        optimum = false;
        break;
      }
    }
    if (optimum) result.optima.push_back(x);
  }
  result.count = result.optima.size();
  return result;
}

FitnessTable table_from_landscape(const Landscape& landscape, std::span<const int> epochs,
                                  Split split, const std::string& metric, double noise,
                                  std::uint64_t noise_seed, std::uint64_t cap) {
  if (epochs.empty()) throw Error(ErrorKind::usage, "at least one epoch is required");
  std::vector<FitnessRecord> records;
  std::uint64_t ordinal = 0;
  for (const auto& g : landscape.enumerate(cap)) {
    const double base = landscape.fitness(g);
    std::vector<Measurement> run;
    for (std::size_t e = 0; e < epochs.size(); ++e) {
      double value = base;
      if (noise > 0.0) {
        const std::uint64_t h =
            splitmix64(derive_seed(noise_seed, ordinal) ^ splitmix64(static_cast<std::uint64_t>(e)));
        const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
        value = std::clamp(base + noise * (2.0 * u - 1.0), 0.0, 1.0);
      }
      run.push_back({split, epochs[e], metric, value});
    }
    records.push_back({g.to_string(), g, std::nullopt, {std::move(run)}});
    ++ordinal;
  }
  return FitnessTable(landscape.name(), std::move(records));
}

}  // namespace lfp
