#include "mutlab/corpus.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "mutlab/error.hpp"
#include "mutlab/rng.hpp"
#include "mutlab/textio.hpp"

namespace mutlab {

using ordered_json = nlohmann::ordered_json;

KillMatrix::KillMatrix(std::vector<std::string> mutant_ids, std::vector<std::string> test_ids)
    : mutant_ids_(std::move(mutant_ids)), test_ids_(std::move(test_ids)) {
  for (std::size_t i = 0; i < mutant_ids_.size(); ++i) {
    if (!mutant_index_.emplace(mutant_ids_[i], i).second)
      throw Error("duplicate_mutant_id", "duplicate mutant id '" + mutant_ids_[i] + "'");
  }
  for (std::size_t i = 0; i < test_ids_.size(); ++i) {
    if (!test_index_.emplace(test_ids_[i], i).second)
      throw Error("duplicate_test_id", "duplicate test id '" + test_ids_[i] + "'");
  }
  rows_.assign(mutant_ids_.size(), BitRow(test_ids_.size()));
}

void KillMatrix::add_kill(const std::string& mutant_id, const std::string& test_id,
                          const std::string& context) {
  auto m = mutant_index_.find(mutant_id);
  if (m == mutant_index_.end())
    throw Error("unmatched_mutant_id", context + ": unmatched mutant id '" + mutant_id + "'");
  auto t = test_index_.find(test_id);
  if (t == test_index_.end())
    throw Error("unmatched_test_id", context + ": unmatched test id '" + test_id + "'");
  rows_[m->second].set(t->second);
}

std::optional<std::size_t> KillMatrix::mutant_index(const std::string& id) const {
  auto it = mutant_index_.find(id);
  if (it == mutant_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> KillMatrix::test_index(const std::string& id) const {
  auto it = test_index_.find(id);
  if (it == test_index_.end()) return std::nullopt;
  return it->second;
}

bool operator==(const KillMatrix& a, const KillMatrix& b) {
  return a.mutant_ids_ == b.mutant_ids_ && a.test_ids_ == b.test_ids_ && a.rows_ == b.rows_;
}

std::optional<std::size_t> FeatureTable::index_of(const std::string& mutant_id) const {
  for (std::size_t i = 0; i < mutant_ids.size(); ++i)
    if (mutant_ids[i] == mutant_id) return i;
  return std::nullopt;
}

const std::vector<std::string>& standard_feature_names() {
  static const std::vector<std::string> names = {
      "statementComplexity", "expressionComplexity", "MutantType",        "BlockDepth",
      "CfgDepth",            "CfgPredNum",           "CfgSuccNum",        "NumInBlock",
      "NumOutDataDeps",      "NumInDataDeps",        "NumOutCtrlDeps",    "NumInCtrlDeps",
      "AstNodeParentType",   "NumberOfAstParents",   "AstNodeType",       "NumberOfAstChildren"};
  return names;
}

const SourceUnit& Corpus::unit_of(const MutantRecord& m) const {
  auto it = unit_index_.find(m.unit_path);
  if (it == unit_index_.end())
    throw Error("unknown_unit", m.mutant_id + ": unit '" + m.unit_path + "' not in corpus");
  return units[it->second];
}

std::optional<std::size_t> Corpus::mutant_index(const std::string& id) const {
  auto it = mutant_index_.find(id);
  if (it == mutant_index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Corpus::labeled_count() const {
  std::size_t n = 0;
  for (const auto& m : mutants)
    if (m.label) ++n;
  return n;
}

namespace {

bool is_categorical_name(const std::string& name) {
  return name.size() > 4 && name.compare(name.size() - 4, 4, "Type") == 0;
}

// ids travel through CSV columns and operator names become single annotation
// tokens, so none of them may carry separators
void check_identifier(const std::string& value, const std::string& what,
                      const std::string& context) {
  if (value.empty())
    throw Error("malformed_line", context + ": " + what + " must not be empty");
  for (char c : value)
    if (c == ',' || c == '\t' || c == ' ' || c == '\n' || c == '\r')
      throw Error("malformed_line",
                  context + ": " + what + " '" + value + "' contains a separator character");
}

ordered_json parse_json(const std::string& text, const std::string& context) {
  ordered_json j = ordered_json::parse(text, nullptr, false);
  if (j.is_discarded()) throw Error("malformed_line", context + ": invalid JSON");
  return j;
}

FeatureTable load_features(const std::filesystem::path& file,
                           const std::vector<MutantRecord>& mutants) {
  std::vector<std::string> lines = read_lines(file);
  if (lines.empty()) throw Error("malformed_line", file.string() + ":1: empty features file");
  std::vector<std::string> header = split(lines[0], ',');
  if (header.empty() || header[0] != "mutant_id")
    throw Error("malformed_line", file.string() + ":1: header must start with mutant_id");

  FeatureTable table;
  for (std::size_t i = 1; i < header.size(); ++i) {
    table.schema.names.push_back(header[i]);
    table.schema.categorical.push_back(is_categorical_name(header[i]));
  }

  std::set<std::string> known;
  for (const auto& m : mutants) known.insert(m.mutant_id);
  std::set<std::string> seen;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    std::string context = file.string() + ":" + std::to_string(li + 1);
    std::vector<std::string> cells = split(lines[li], ',');
    if (cells.size() != header.size())
      throw Error("malformed_line", context + ": expected " + std::to_string(header.size()) +
                                        " columns, got " + std::to_string(cells.size()));
    if (!known.count(cells[0]))
      throw Error("unmatched_mutant_id", context + ": unmatched mutant id '" + cells[0] + "'");
    if (!seen.insert(cells[0]).second)
      throw Error("duplicate_mutant_id", context + ": duplicate feature row for '" + cells[0] + "'");
    table.mutant_ids.push_back(cells[0]);
    std::vector<double> row;
    for (std::size_t ci = 1; ci < cells.size(); ++ci)
      row.push_back(parse_double(cells[ci], context));
    table.values.push_back(std::move(row));
  }
  for (const auto& m : mutants)
    if (!seen.count(m.mutant_id))
      throw Error("unmatched_mutant_id",
                  file.string() + ": no feature row for mutant '" + m.mutant_id + "'");
  return table;
}

}  // namespace

Corpus load_corpus(const std::filesystem::path& root) {
  Corpus corpus;
  corpus.root = root;

  ordered_json manifest = parse_json(read_file(root / "manifest.json"), "manifest.json");

  if (!manifest.contains("units") || !manifest["units"].is_array())
    throw Error("malformed_line", "manifest.json: missing units array");
  std::set<std::string> projects;
  for (const auto& u : manifest["units"]) {
    SourceUnit unit;
    unit.path = u.at("path").get<std::string>();
    unit.project_id = u.at("project").get<std::string>();
    unit.text = read_file(root / unit.path);
    try {
      unit.statement_count = statement_count(tokenize(unit.text));
    } catch (const Error& e) {
      throw Error("tokenize_error", unit.path + ":" + e.what());
    }
    if (!corpus.unit_index_.emplace(unit.path, corpus.units.size()).second)
      throw Error("duplicate_unit", "manifest.json: duplicate unit '" + unit.path + "'");
    projects.insert(unit.project_id);
    corpus.units.push_back(std::move(unit));
  }
  corpus.project_ids.assign(projects.begin(), projects.end());

  std::vector<std::string> test_ids;
  for (const auto& t : manifest.at("tests")) {
    test_ids.push_back(t.get<std::string>());
    check_identifier(test_ids.back(), "test id", "manifest.json");
  }

  const std::string mutants_file = manifest.at("mutants").get<std::string>();
  std::vector<std::string> lines = read_lines(root / mutants_file);
  std::vector<std::string> mutant_ids;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    std::string context = mutants_file + ":" + std::to_string(li + 1);
    ordered_json j = parse_json(lines[li], context);
    MutantRecord m;
    try {
      m.mutant_id = j.at("mutant_id").get<std::string>();
      m.project_id = j.at("project_id").get<std::string>();
      m.unit_path = j.at("unit_path").get<std::string>();
      m.statement_index = j.at("statement_index").get<std::size_t>();
      m.operator_name = j.at("operator").get<std::string>();
    } catch (const ordered_json::exception& e) {
      throw Error("malformed_line", context + ": " + e.what());
    }
    check_identifier(m.mutant_id, "mutant id", context);
    check_identifier(m.operator_name, "operator name", context);
    if (!corpus.mutant_index_.emplace(m.mutant_id, corpus.mutants.size()).second)
      throw Error("duplicate_mutant_id", context + ": duplicate mutant id '" + m.mutant_id + "'");
    auto unit_it = corpus.unit_index_.find(m.unit_path);
    if (unit_it == corpus.unit_index_.end())
      throw Error("unknown_unit", context + ": unit '" + m.unit_path + "' not in manifest");
    const SourceUnit& unit = corpus.units[unit_it->second];
    if (m.project_id != unit.project_id)
      throw Error("id_mismatch", context + ": mutant project '" + m.project_id +
                                     "' does not match unit project '" + unit.project_id + "'");
    if (m.statement_index >= unit.statement_count)
      throw Error("statement_out_of_range",
                  context + ": statement index " + std::to_string(m.statement_index) +
                      " out of range (unit has " + std::to_string(unit.statement_count) +
                      " statements)");
    mutant_ids.push_back(m.mutant_id);
    corpus.mutants.push_back(std::move(m));
  }

  corpus.kills = KillMatrix(mutant_ids, test_ids);
  const std::string kills_file = manifest.at("kills").get<std::string>();
  std::vector<std::string> kill_lines = read_lines(root / kills_file);
  if (kill_lines.empty() || kill_lines[0] != "mutant_id,test_id")
    throw Error("malformed_line", kills_file + ":1: expected header 'mutant_id,test_id'");
  for (std::size_t li = 1; li < kill_lines.size(); ++li) {
    if (kill_lines[li].empty()) continue;
    std::string context = kills_file + ":" + std::to_string(li + 1);
    std::vector<std::string> cells = split(kill_lines[li], ',');
    if (cells.size() != 2) throw Error("malformed_line", context + ": expected two columns");
    corpus.kills.add_kill(cells[0], cells[1], context);
  }

  if (manifest.contains("features")) {
    std::filesystem::path f = root / manifest["features"].get<std::string>();
    if (std::filesystem::exists(f)) corpus.features = load_features(f, corpus.mutants);
  }

  if (manifest.contains("labels")) {
    std::filesystem::path f = root / manifest["labels"].get<std::string>();
    if (std::filesystem::exists(f)) {
      std::map<std::string, SeqLabel> labels = load_labels(f);
      for (const auto& [id, label] : labels) {
        auto idx = corpus.mutant_index(id);
        if (!idx)
          throw Error("unmatched_mutant_id",
                      f.string() + ": unmatched mutant id '" + id + "'");
        corpus.mutants[*idx].label = label;
      }
    }
  }

  return corpus;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& root) {
  std::filesystem::create_directories(root);

  ordered_json manifest;
  manifest["units"] = ordered_json::array();
  for (const auto& unit : corpus.units) {
    manifest["units"].push_back({{"path", unit.path}, {"project", unit.project_id}});
    write_file(root / unit.path, unit.text);
  }
  manifest["tests"] = corpus.kills.test_ids();
  manifest["mutants"] = "mutants.jsonl";
  manifest["kills"] = "kills.csv";
  if (corpus.features) manifest["features"] = "features.csv";
  manifest["labels"] = "labels.csv";  // written by the labeling stage; optional at load
  write_file(root / "manifest.json", manifest.dump(2) + "\n");

  std::string mutants_text;
  for (const auto& m : corpus.mutants) {
    ordered_json j{{"mutant_id", m.mutant_id},
                   {"project_id", m.project_id},
                   {"unit_path", m.unit_path},
                   {"statement_index", m.statement_index},
                   {"operator", m.operator_name}};
    mutants_text += j.dump() + "\n";
  }
  write_file(root / "mutants.jsonl", mutants_text);

  std::string kills_text = "mutant_id,test_id\n";
  for (std::size_t mi = 0; mi < corpus.kills.mutant_count(); ++mi)
    for (std::size_t ti = 0; ti < corpus.kills.test_count(); ++ti)
      if (corpus.kills.kills(mi, ti))
        kills_text += corpus.kills.mutant_ids()[mi] + "," + corpus.kills.test_ids()[ti] + "\n";
  write_file(root / "kills.csv", kills_text);

  if (corpus.features) {
    std::string text = "mutant_id," + join(corpus.features->schema.names, ",") + "\n";
    for (std::size_t i = 0; i < corpus.features->mutant_ids.size(); ++i) {
      text += corpus.features->mutant_ids[i];
      for (double v : corpus.features->values[i]) text += "," + format_double(v);
      text += "\n";
    }
    write_file(root / "features.csv", text);
  }

  if (corpus.labeled_count() > 0) {
    std::map<std::string, SeqLabel> labels;
    for (const auto& m : corpus.mutants)
      if (m.label) labels.emplace(m.mutant_id, *m.label);
    save_labels(labels, root / "labels.csv");
  }
}

void save_labels(const std::map<std::string, SeqLabel>& labels,
                 const std::filesystem::path& file) {
  std::string text = "mutant_id,label\n";
  for (const auto& [id, label] : labels) text += id + "," + label_char(label) + "\n";
  write_file(file, text);
}

std::map<std::string, SeqLabel> load_labels(const std::filesystem::path& file) {
  std::vector<std::string> lines = read_lines(file);
  if (lines.empty() || lines[0] != "mutant_id,label")
    throw Error("malformed_line", file.string() + ":1: expected header 'mutant_id,label'");
  std::map<std::string, SeqLabel> labels;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    std::string context = file.string() + ":" + std::to_string(li + 1);
    std::vector<std::string> cells = split(lines[li], ',');
    if (cells.size() != 2) throw Error("malformed_line", context + ": expected two columns");
    if (cells[1] != "S" && cells[1] != "N")
      throw Error("malformed_line", context + ": label must be S or N, got '" + cells[1] + "'");
    labels[cells[0]] = cells[1] == "S" ? SeqLabel::S : SeqLabel::N;
  }
  return labels;
}

std::vector<std::string> FoldSplit::projects_in(int fold) const {
  std::vector<std::string> out;
  for (const auto& [project, f] : assignments)
    if (f == fold) out.push_back(project);
  return out;
}

FoldSplit make_folds(const Corpus& corpus, int k, std::uint64_t seed) {
  if (k <= 0) throw Error("invalid_fold_count", "fold count must be positive");
  if (static_cast<std::size_t>(k) > corpus.project_ids.size())
    throw Error("invalid_fold_count", "fold count " + std::to_string(k) + " exceeds project count " +
                                          std::to_string(corpus.project_ids.size()));
  std::vector<std::string> projects = corpus.project_ids;  // sorted
  Rng rng(seed);
  rng.shuffle(projects);
  FoldSplit folds;
  folds.fold_count = k;
  for (std::size_t i = 0; i < projects.size(); ++i)
    folds.assignments[projects[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
  return folds;
}

void save_folds(const FoldSplit& folds, const std::filesystem::path& file) {
  ordered_json j;
  j["fold_count"] = folds.fold_count;
  j["assignments"] = ordered_json::object();
  for (const auto& [project, fold] : folds.assignments) j["assignments"][project] = fold;
  write_file(file, j.dump(2) + "\n");
}

FoldSplit load_folds(const std::filesystem::path& file) {
  ordered_json j = parse_json(read_file(file), file.string());
  FoldSplit folds;
  folds.fold_count = j.at("fold_count").get<int>();
  for (const auto& [project, fold] : j.at("assignments").items())
    folds.assignments[project] = fold.get<int>();
  return folds;
}

std::pair<std::vector<int>, int> split_train_valid(const std::vector<int>& train_folds) {
  if (train_folds.size() < 2)
    throw Error("too_few_folds", "need at least two training folds to reserve validation");
  std::vector<int> train(train_folds.begin(), train_folds.end() - 1);
  return {train, train_folds.back()};
}

}  // namespace mutlab
