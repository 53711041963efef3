#include "wordprobe/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace wordprobe {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

// RFC 4180 style: commas separate, double quotes protect, "" escapes a quote.
std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(trim(cell));
      cell.clear();
    } else {
      cell.push_back(c);
    }
  }
  cells.push_back(trim(cell));
  return cells;
}

Transform parse_transform(std::string_view name, std::size_t line) {
  if (name == "log10") return Transform::log10;
  if (name == "none" || name.empty()) return Transform::none;
  throw ParseError("unknown transform '" + std::string(name) + "'", line);
}

TargetMeta parse_header_cell(const std::string& cell) {
  TargetMeta meta;
  std::string rest = cell;
  if (const auto colon = rest.rfind(':'); colon != std::string::npos) {
    meta.transform = parse_transform(trim(rest.substr(colon + 1)), 1);
    rest = rest.substr(0, colon);
  }
  if (const auto open = rest.find('['); open != std::string::npos) {
    const auto close = rest.find(']', open);
    if (close == std::string::npos)
      throw ParseError("unterminated unit in header cell '" + cell + "'", 1);
    meta.units = trim(rest.substr(open + 1, close - open - 1));
    rest = rest.substr(0, open);
  }
  meta.name = trim(rest);
  if (meta.name.empty()) throw ParseError("empty target name in header", 1);
  return meta;
}

void apply_sidecar(EntityTable& table, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open transform config " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const auto text = trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos)
      throw ParseError(path.string() + ":" + std::to_string(line_no) +
                           ": expected 'target=transform'",
                       line_no);
    const auto target = trim(text.substr(0, eq));
    const auto idx = table.target_index(target);
    table.targets[idx].transform = parse_transform(trim(text.substr(eq + 1)), line_no);
  }
}

}  // namespace

std::size_t EntityTable::target_index(std::string_view target) const {
  for (std::size_t i = 0; i < targets.size(); ++i)
    if (targets[i].name == target) return i;
  throw Error("unknown target '" + std::string(target) + "'");
}

EntityTable load_entity_table(const std::filesystem::path& path,
                              std::optional<std::filesystem::path> sidecar) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset " + path.string());

  EntityTable table;
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + " is empty", 1);
  const auto header = split_csv_line(line);
  if (header.empty() || ascii_lower(header.front()) != "name")
    throw ParseError(path.string() + ": first column must be 'name'", 1);
  for (std::size_t c = 1; c < header.size(); ++c) {
    table.targets.push_back(parse_header_cell(header[c]));
    for (std::size_t p = 0; p + 1 < table.targets.size(); ++p)
      if (table.targets[p].name == table.targets.back().name)
        throw ParseError("duplicate target column '" + table.targets.back().name + "'", 1);
  }
  table.columns.resize(table.targets.size());

  std::unordered_set<std::string> seen;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                           std::to_string(header.size()) + " cells, found " +
                           std::to_string(cells.size()),
                       line_no);
    if (cells[0].empty())
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": empty name",
                       line_no);
    if (!seen.insert(cells[0]).second)
      throw ParseError(path.string() + ":" + std::to_string(line_no) +
                           ": duplicate entity '" + cells[0] + "'",
                       line_no);
    table.names.push_back(cells[0]);
    for (std::size_t c = 1; c < cells.size(); ++c) {
      const auto& cell = cells[c];
      if (cell.empty()) {
        table.columns[c - 1].push_back(std::nullopt);
        continue;
      }
      double value = 0.0;
      const auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (ec != std::errc() || end != cell.data() + cell.size() || !std::isfinite(value))
        throw ParseError(path.string() + ":" + std::to_string(line_no) + ": column '" +
                             table.targets[c - 1].name + "' holds non-numeric '" + cell +
                             "'",
                         line_no);
      table.columns[c - 1].push_back(value);
    }
  }

  if (!sidecar) {
    auto automatic = path;
    automatic += ".transforms";
    if (std::filesystem::exists(automatic)) sidecar = automatic;
  }
  if (sidecar) apply_sidecar(table, *sidecar);
  return table;
}

EntityTable apply_transforms(const EntityTable& table) {
  EntityTable out = table;
  for (std::size_t t = 0; t < out.targets.size(); ++t) {
    auto& meta = out.targets[t];
    if (meta.transform == Transform::none) continue;
    if (meta.applied != Transform::none)
      throw Error("target '" + meta.name + "' is already transformed");
    for (std::size_t i = 0; i < out.names.size(); ++i) {
      auto& cell = out.columns[t][i];
      if (!cell) continue;
      if (*cell <= 0.0)
        throw Error("log10 of non-positive " + meta.name + " for entity '" +
                    out.names[i] + "'");
      cell = std::log10(*cell);
    }
    meta.applied = meta.transform;
    meta.transform = Transform::none;
  }
  return out;
}

EntityTable restrict_entities(const EntityTable& table,
                              const std::vector<std::string>& keep) {
  std::unordered_set<std::string> wanted(keep.begin(), keep.end());
  std::unordered_set<std::string> present(table.names.begin(), table.names.end());
  for (const auto& name : wanted)
    if (!present.count(name)) throw Error("subset names unknown entity '" + name + "'");

  EntityTable out;
  out.targets = table.targets;
  out.columns.resize(table.targets.size());
  for (std::size_t i = 0; i < table.names.size(); ++i) {
    if (!wanted.count(table.names[i])) continue;
    out.names.push_back(table.names[i]);
    for (std::size_t t = 0; t < table.targets.size(); ++t)
      out.columns[t].push_back(table.columns[t][i]);
  }
  return out;
}

std::vector<std::string> read_word_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open word list " + path.string());
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    auto word = trim(line);
    if (!word.empty()) words.push_back(std::move(word));
  }
  return words;
}

std::size_t JoinedDesign::target_index(std::string_view target) const {
  for (std::size_t i = 0; i < targets.size(); ++i)
    if (targets[i].name == target) return i;
  throw Error("unknown target '" + std::string(target) + "'");
}

std::vector<std::size_t> JoinedDesign::rows_with(std::string_view target) const {
  const auto& col = column(target);
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < col.size(); ++i)
    if (col[i]) rows.push_back(i);
  return rows;
}

JoinedDesign JoinedDesign::with_features(Matrix replacement) const {
  if (replacement.rows() != features.rows())
    throw Error("replacement features have the wrong number of rows");
  JoinedDesign out = *this;
  out.features = std::move(replacement);
  return out;
}

JoinedDesign join_embeddings(const EntityTable& table, const EmbeddingStore& store,
                             const LookupStrategy& strategy) {
  if (table.size() == 0) throw Error("entity table is empty");

  std::vector<Vector> rows;
  std::vector<std::size_t> kept;
  JoinedDesign design;
  for (std::size_t i = 0; i < table.size(); ++i) {
    auto vec = lookup_entity(store, table.names[i], strategy);
    if (!vec) {
      design.dropped.push_back(
          {table.names[i], "not resolvable with " +
                               std::string(lookup_mode_name(strategy.mode)) + "/" +
                               std::string(case_policy_name(strategy.case_policy)) +
                               " lookup"});
      continue;
    }
    rows.push_back(std::move(*vec));
    kept.push_back(i);
  }
  if (rows.empty()) throw Error("no entity could be resolved in the embedding store");

  const auto d = static_cast<Eigen::Index>(store.dimension());
  design.features.resize(static_cast<Eigen::Index>(rows.size()), d);
  for (std::size_t r = 0; r < rows.size(); ++r)
    design.features.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
  design.targets = table.targets;
  design.columns.resize(table.targets.size());
  for (const auto i : kept) {
    design.names.push_back(table.names[i]);
    for (std::size_t t = 0; t < table.targets.size(); ++t)
      design.columns[t].push_back(table.columns[t][i]);
  }
  return design;
}

Split train_test_split(std::size_t n, const SplitSpec& spec) {
  if (n < 5) throw Error("train/test split needs at least 5 rows, got " + std::to_string(n));
  if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0))
    throw Error("test fraction must lie in (0, 1)");
  const auto n_test = static_cast<std::size_t>(
      std::llround(static_cast<double>(n) * spec.test_fraction));
  if (n_test == 0 || n_test >= n)
    throw Error("test fraction leaves an empty train or test side");

  const auto order = random_permutation(n, spec.seed);
  Split split;
  split.test.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
  split.train.assign(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
  std::sort(split.test.begin(), split.test.end());
  std::sort(split.train.begin(), split.train.end());
  return split;
}

}  // namespace wordprobe
