#include "wordprobe/commands.hpp"

#include "wordprobe/ablation.hpp"
#include "wordprobe/dataset.hpp"
#include "wordprobe/ridge.hpp"
#include "wordprobe/semantic_scan.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace wordprobe {

using nlohmann::json;

namespace {

struct Inputs {
  EmbeddingStore store;
  JoinedDesign design;
  std::vector<std::string> targets;
  std::vector<std::string> warnings;
};

Inputs load_inputs(const RunConfig& config) {
  if (config.embeddings.empty()) throw Error("--embeddings is required");
  if (config.dataset.empty()) throw Error("--dataset is required");
  if (!std::filesystem::exists(config.embeddings))
    throw Error("embeddings file " + config.embeddings.string() + " does not exist");

  auto store = load_embeddings(config.embeddings, config.format);
  std::optional<std::filesystem::path> sidecar;
  if (!config.transforms.empty()) sidecar = config.transforms;
  auto table = apply_transforms(load_entity_table(config.dataset, sidecar));
  if (!config.subset.empty()) table = restrict_entities(table, read_word_list(config.subset));

  auto design = join_embeddings(table, store, config.strategy());
  Inputs in{std::move(store), std::move(design), config.targets, {}};
  if (in.targets.empty())
    for (const auto& t : in.design.targets) in.targets.push_back(t.name);
  for (const auto& t : in.targets) (void)in.design.target_index(t);

  for (const auto& d : in.design.dropped)
    in.warnings.push_back("dropped entity '" + d.name + "': " + d.reason);
  for (const auto& t : in.targets) {
    const auto present = in.design.rows_with(t).size();
    if (present < in.design.rows())
      in.warnings.push_back("target '" + t + "' is missing for " +
                            std::to_string(in.design.rows() - present) + " entities");
  }
  return in;
}

CvSpec cv_spec(const RunConfig& config) {
  CvSpec cv;
  cv.folds = config.folds;
  cv.lambda_grid = log_lambda_grid(config.lambda_lo, config.lambda_hi, config.lambda_count);
  cv.seed = config.seed;
  return cv;
}

json optional_number(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

json design_summary(const JoinedDesign& design) {
  json dropped = json::array();
  for (const auto& d : design.dropped) dropped.push_back({{"name", d.name}, {"reason", d.reason}});
  json targets = json::array();
  for (const auto& t : design.targets) {
    targets.push_back({{"name", t.name},
                       {"units", t.units},
                       {"transform", t.applied == Transform::log10 ? "log10" : "none"}});
  }
  return {{"entities", design.rows()},
          {"dimension", design.features.cols()},
          {"targets", targets},
          {"dropped", dropped}};
}

std::filesystem::path companion(const RunConfig& config, const std::string& suffix) {
  auto path = config.output;
  path.replace_filename(config.output.stem().string() + "." + suffix);
  return path;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string csv_cell(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string quoted = "\"";
  for (const char c : text) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + '"';
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

json envelope(const RunConfig& config, json payload, const std::vector<std::string>& warnings,
              std::chrono::steady_clock::time_point started) {
  const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started);
  json report = {{"tool", "wordprobe"},
                 {"version", WORDPROBE_VERSION},
                 {"command", config.command},
                 {"config", config.to_json()},
                 {"payload", std::move(payload)},
                 {"warnings", warnings},
                 {"duration_seconds", elapsed.count()}};
  if (!config.output.empty()) write_text(config.output, report.dump(2) + "\n");
  return report;
}

json probe_json(const ProbeResult& r, const JoinedDesign& design) {
  json predictions = json::array();
  for (std::size_t i = 0; i < r.test_rows.size(); ++i)
    predictions.push_back({{"entity", design.names[r.test_rows[i]]},
                           {"actual", r.actual[i]},
                           {"predicted", r.predicted[i]}});
  return {{"target", r.target},
          {"lambda", r.lambda},
          {"r2", optional_number(r.r2)},
          {"mae", r.mae},
          {"n_train", r.n_train},
          {"n_test", r.n_test},
          {"split_seed", r.split.seed},
          {"test_fraction", r.split.test_fraction},
          {"cv_mean_mse", r.cv_mean_mse},
          {"predictions", predictions}};
}

}  // namespace

LookupStrategy RunConfig::strategy() const {
  auto s = LookupStrategy::defaults_for(format);
  if (lookup) s.mode = *lookup;
  if (case_policy) s.case_policy = *case_policy;
  return s;
}

json RunConfig::to_json() const {
  const auto s = strategy();
  return {{"command", command},
          {"embeddings", embeddings.string()},
          {"format", std::string(format_name(format))},
          {"lookup", std::string(lookup_mode_name(s.mode))},
          {"case", std::string(case_policy_name(s.case_policy))},
          {"dataset", dataset.string()},
          {"transforms", transforms.string()},
          {"subset", subset.string()},
          {"targets", targets},
          {"seed", seed},
          {"test_fraction", test_fraction},
          {"folds", folds},
          {"lambda_grid", {lambda_lo, lambda_hi, lambda_count}},
          {"output", output.string()},
          {"seeds", seeds},
          {"top_k", top_k},
          {"vocab_size", vocab_size},
          {"min_length", min_length},
          {"alphabetic_only", alphabetic_only},
          {"exclusions", exclusions.string()},
          {"pos", pos_word},
          {"neg", neg_word},
          {"categories", categories},
          {"categories_dir", categories_dir.string()},
          {"n_random", n_random},
          {"master_seed", master_seed},
          {"var_threshold", var_threshold},
          {"max_dims", max_dims},
          {"combined", combined}};
}

RunConfig RunConfig::from_json(const json& j) {
  RunConfig c;
  c.command = j.at("command").get<std::string>();
  c.embeddings = j.at("embeddings").get<std::string>();
  c.format = parse_format(j.at("format").get<std::string>());
  c.lookup = parse_lookup_mode(j.at("lookup").get<std::string>());
  c.case_policy = parse_case_policy(j.at("case").get<std::string>());
  c.dataset = j.at("dataset").get<std::string>();
  c.transforms = j.value("transforms", std::string());
  c.subset = j.value("subset", std::string());
  c.targets = j.at("targets").get<std::vector<std::string>>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.test_fraction = j.at("test_fraction").get<double>();
  c.folds = j.at("folds").get<std::size_t>();
  const auto& grid = j.at("lambda_grid");
  c.lambda_lo = grid.at(0).get<double>();
  c.lambda_hi = grid.at(1).get<double>();
  c.lambda_count = grid.at(2).get<std::size_t>();
  c.output = j.value("output", std::string());
  c.seeds = j.value("seeds", std::size_t{0});
  c.top_k = j.value("top_k", c.top_k);
  c.vocab_size = j.value("vocab_size", c.vocab_size);
  c.min_length = j.value("min_length", c.min_length);
  c.alphabetic_only = j.value("alphabetic_only", c.alphabetic_only);
  c.exclusions = j.value("exclusions", std::string());
  c.pos_word = j.value("pos", std::string());
  c.neg_word = j.value("neg", std::string());
  c.categories = j.value("categories", std::vector<std::string>{});
  c.categories_dir = j.value("categories_dir", std::string());
  c.n_random = j.value("n_random", c.n_random);
  c.master_seed = j.value("master_seed", c.master_seed);
  c.var_threshold = j.value("var_threshold", c.var_threshold);
  c.max_dims = j.value("max_dims", c.max_dims);
  c.combined = j.value("combined", c.combined);
  return c;
}

json cmd_probe(const RunConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  const auto in = load_inputs(config);
  const auto cv = cv_spec(config);
  const SplitSpec split{config.test_fraction, config.seed};

  json results = json::array();
  for (const auto& target : in.targets) {
    const auto r = probe_target(in.design, target, split, cv);
    auto entry = probe_json(r, in.design);
    if (config.seeds > 0) {
      const auto sweep =
          stability_sweep(in.design, target, config.seeds, config.seed, config.test_fraction, cv);
      json per_seed = json::array();
      for (const auto& run : sweep.runs)
        per_seed.push_back({{"seed", run.split.seed},
                            {"r2", optional_number(run.r2)},
                            {"mae", run.mae},
                            {"lambda", run.lambda}});
      entry["stability"] = {{"first_seed", config.seed},
                            {"n_seeds", config.seeds},
                            {"runs", per_seed},
                            {"mean_r2", sweep.mean_r2},
                            {"min_r2", sweep.min_r2}};
    }
    if (!config.output.empty()) {
      std::string csv = "entity,actual,predicted\n";
      for (std::size_t i = 0; i < r.test_rows.size(); ++i)
        csv += csv_cell(in.design.names[r.test_rows[i]]) + "," + format_number(r.actual[i]) +
               "," + format_number(r.predicted[i]) + "\n";
      write_text(companion(config, target + ".predictions.csv"), csv);
    }
    results.push_back(std::move(entry));
  }
  json payload = {{"design", design_summary(in.design)}, {"probes", results}};
  return envelope(config, std::move(payload), in.warnings, started);
}

json cmd_scan(const RunConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  const auto in = load_inputs(config);
  VocabFilter filter;
  filter.top_k = config.vocab_size;
  filter.min_length = config.min_length;
  filter.alphabetic_only = config.alphabetic_only;
  if (!config.exclusions.empty()) filter.load_exclusions(config.exclusions);
  const auto vocabulary_size = filter_vocabulary(in.store, filter).size();

  json scans = json::array();
  for (const auto& target : in.targets) {
    const auto all = scan(in.store, in.design, target, filter);
    const auto to_json = [](const std::vector<WordCorrelation>& list) {
      json out = json::array();
      for (const auto& w : list)
        out.push_back({{"word", w.word}, {"r", w.r}, {"p", w.p_value}, {"n", w.n}});
      return out;
    };
    json entry = {{"target", target},
                  {"entities", in.design.rows_with(target).size()},
                  {"vocabulary", vocabulary_size},
                  {"scored", all.size()},
                  {"top_positive", to_json(top_k(all, config.top_k, Direction::positive))},
                  {"top_negative", to_json(top_k(all, config.top_k, Direction::negative))},
                  {"correlations", to_json(all)}};
    if (!config.output.empty()) {
      std::string csv = "word,r,p,n\n";
      for (const auto& w : all)
        csv += csv_cell(w.word) + "," + format_number(w.r) + "," + format_number(w.p_value) +
               "," + std::to_string(w.n) + "\n";
      write_text(companion(config, target + ".correlations.csv"), csv);
    }
    scans.push_back(std::move(entry));
  }
  json exclusion_sizes = json::object();
  for (const auto& [name, words] : filter.exclusion_lists) exclusion_sizes[name] = words.size();
  json payload = {{"design", design_summary(in.design)},
                  {"filter",
                   {{"top_k", filter.top_k},
                    {"min_length", filter.min_length},
                    {"alphabetic_only", filter.alphabetic_only},
                    {"exclusion_lists", exclusion_sizes}}},
                  {"scans", scans}};
  return envelope(config, std::move(payload), in.warnings, started);
}

json cmd_composite(const RunConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  if (config.pos_word.empty() || config.neg_word.empty())
    throw Error("composite needs --pos and --neg");
  const auto in = load_inputs(config);

  json results = json::array();
  std::string csv = "target,entity,score,value\n";
  for (const auto& target : in.targets) {
    const auto c = composite(in.store, in.design, config.pos_word, config.neg_word, target);
    json scores = json::array();
    for (std::size_t i = 0; i < c.names.size(); ++i) {
      scores.push_back({{"entity", c.names[i]}, {"score", c.scores[i]}, {"value", c.targets[i]}});
      csv += csv_cell(target) + "," + csv_cell(c.names[i]) + "," + format_number(c.scores[i]) +
             "," + format_number(c.targets[i]) + "\n";
    }
    results.push_back({{"target", target},
                       {"r", c.correlation.r},
                       {"p", c.correlation.p_value},
                       {"n", c.correlation.n},
                       {"scores", scores}});
  }
  if (!config.output.empty()) write_text(companion(config, "scores.csv"), csv);
  json payload = {{"design", design_summary(in.design)},
                  {"pos", config.pos_word},
                  {"neg", config.neg_word},
                  {"composites", results}};
  return envelope(config, std::move(payload), in.warnings, started);
}

json cmd_ablate(const RunConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  if (config.categories.empty()) throw Error("ablate needs --categories");
  const auto in = load_inputs(config);

  std::vector<Subspace> subspaces;
  for (const auto& entry : config.categories) {
    std::filesystem::path path = entry;
    if (!std::filesystem::is_regular_file(path)) {
      if (config.categories_dir.empty())
        throw Error("category '" + entry + "' is not a file and no --categories-dir is set");
      path = config.categories_dir / (entry + ".txt");
    }
    if (!std::filesystem::is_regular_file(path))
      throw Error("category file " + path.string() + " does not exist");
    subspaces.push_back(category_subspace(in.store, SemanticCategory::load(path),
                                          config.strategy(), config.var_threshold,
                                          config.max_dims));
  }

  AblationSettings settings;
  settings.split = {config.test_fraction, config.seed};
  settings.cv = cv_spec(config);
  settings.n_random = config.n_random;
  settings.master_seed = config.master_seed;

  std::vector<AblationReport> reports;
  for (const auto& sub : subspaces)
    reports.push_back(ablation_experiment(in.design, in.targets, sub, settings));
  if (config.combined && subspaces.size() >= 2)
    reports.push_back(combined_ablation(in.design, in.targets, subspaces, settings));

  json out = json::array();
  std::string csv = "category,dims";
  for (const auto& t : in.targets) csv += "," + t + "_delta_r2," + t + "_z";
  csv += "\n";
  for (const auto& r : reports) {
    json rows = json::array();
    csv += csv_cell(r.category) + "," + std::to_string(r.dims);
    for (const auto& t : r.targets) {
      rows.push_back({{"target", t.target},
                      {"baseline_r2", t.baseline_r2},
                      {"ablated_r2", t.ablated_r2},
                      {"delta_r2", t.delta_r2},
                      {"random_mean_delta", t.random_mean_delta},
                      {"random_std_delta", t.random_std_delta},
                      {"z", optional_number(t.z_score)},
                      {"n_random", r.n_random},
                      {"lambda_baseline", t.lambda_baseline},
                      {"lambda_ablated", t.lambda_ablated},
                      {"random_deltas", t.random_deltas}});
      csv += "," + format_number(t.delta_r2) + "," +
             (t.z_score ? format_number(*t.z_score) : std::string());
    }
    csv += "\n";
    out.push_back({{"category", r.category},
                   {"dims", r.dims},
                   {"components", r.components},
                   {"effective_rank", r.effective_rank},
                   {"master_seed", r.master_seed},
                   {"targets", rows}});
  }
  json variance = json::object();
  for (const auto& s : subspaces) variance[s.source] = s.explained_variance;
  if (!config.output.empty()) write_text(companion(config, "table.csv"), csv);

  auto warnings = in.warnings;
  for (const auto& r : reports)
    if (r.components.size() > 1 && r.effective_rank < r.dims)
      warnings.push_back("combined subspaces overlap: nominal " + std::to_string(r.dims) +
                         " dims, effective rank " + std::to_string(r.effective_rank));
  json payload = {{"design", design_summary(in.design)},
                  {"explained_variance", variance},
                  {"ablations", out}};
  return envelope(config, std::move(payload), warnings, started);
}

json run_command(const RunConfig& config) {
  if (config.command == "probe") return cmd_probe(config);
  if (config.command == "scan") return cmd_scan(config);
  if (config.command == "composite") return cmd_composite(config);
  if (config.command == "ablate") return cmd_ablate(config);
  throw Error("unknown command '" + config.command + "'");
}

json strip_timing(json report) {
  if (report.is_object()) {
    report.erase("duration_seconds");
    for (auto& [key, value] : report.items()) value = strip_timing(value);
  } else if (report.is_array()) {
    for (auto& value : report) value = strip_timing(value);
  }
  return report;
}

double max_metric_difference(const json& a, const json& b) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (a.is_number() && b.is_number()) {
    const double x = a.get<double>();
    const double y = b.get<double>();
    return x == y ? 0.0 : std::abs(x - y);
  }
  if (a.type() != b.type()) return inf;
  if (a.is_array()) {
    if (a.size() != b.size()) return inf;
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
      worst = std::max(worst, max_metric_difference(a[i], b[i]));
    return worst;
  }
  if (a.is_object()) {
    if (a.size() != b.size()) return inf;
    double worst = 0.0;
    for (auto it = a.begin(); it != a.end(); ++it) {
      if (!b.contains(it.key())) return inf;
      worst = std::max(worst, max_metric_difference(it.value(), b.at(it.key())));
    }
    return worst;
  }
  return a == b ? 0.0 : inf;
}

}  // namespace wordprobe
