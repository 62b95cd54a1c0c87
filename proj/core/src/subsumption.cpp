#include "mutlab/subsumption.hpp"

#include <algorithm>
#include <unordered_map>

#include <json.hpp>

#include "mutlab/error.hpp"
#include "mutlab/textio.hpp"

namespace mutlab {

std::vector<KillSet> kill_sets(const KillMatrix& matrix) {
  std::vector<KillSet> sets;
  sets.reserve(matrix.mutant_count());
  for (std::size_t mi = 0; mi < matrix.mutant_count(); ++mi) {
    KillSet ks;
    ks.mutant_id = matrix.mutant_ids()[mi];
    for (std::size_t ti = 0; ti < matrix.test_count(); ++ti)
      if (matrix.kills(mi, ti)) ks.tests.push_back(matrix.test_ids()[ti]);
    sets.push_back(std::move(ks));
  }
  return sets;
}

std::size_t GroundTruth::count(MutantFate f) const {
  return static_cast<std::size_t>(std::count(fate.begin(), fate.end(), f));
}

LabelingResult subsuming_mutants(const KillMatrix& matrix) {
  LabelingResult result;
  result.labels.fate.assign(matrix.mutant_count(), MutantFate::Equivalent);

  // Group killable mutants by identical kill sets, hash first.
  std::unordered_map<std::size_t, std::vector<std::size_t>> buckets;
  for (std::size_t mi = 0; mi < matrix.mutant_count(); ++mi) {
    const BitRow& row = matrix.row(mi);
    if (!row.any()) continue;  // equivalent
    buckets[row.hash()].push_back(mi);
  }

  auto& groups = result.graph.groups;
  std::vector<std::size_t> order;
  for (auto& [hash, members] : buckets) order.insert(order.end(), members.begin(), members.end());
  std::sort(order.begin(), order.end());
  for (std::size_t mi : order) {
    const BitRow& row = matrix.row(mi);
    bool placed = false;
    for (auto& g : groups) {
      if (g.kill_set == row) {
        g.mutants.push_back(mi);
        placed = true;
        break;
      }
    }
    if (!placed) groups.push_back({{mi}, row});
  }

  // Strict-subset edges between groups; a group with no incoming edge holds
  // subsuming mutants.
  std::vector<bool> dominated(groups.size(), false);
  for (std::size_t a = 0; a < groups.size(); ++a) {
    for (std::size_t b = 0; b < groups.size(); ++b) {
      if (a == b) continue;
      if (groups[a].kill_set.subset_of(groups[b].kill_set)) {
        // identical sets are merged already, so this is strict
        result.graph.edges.emplace_back(a, b);
        dominated[b] = true;
      }
    }
  }

  for (std::size_t g = 0; g < groups.size(); ++g) {
    MutantFate f = dominated[g] ? MutantFate::Subsumed : MutantFate::Subsuming;
    for (std::size_t mi : groups[g].mutants) result.labels.fate[mi] = f;
  }
  return result;
}

double subsuming_score(const GroundTruth& labels, const std::vector<std::string>& suite,
                       const KillMatrix& matrix) {
  std::size_t total = labels.count(MutantFate::Subsuming);
  if (total == 0)
    throw Error("no_subsuming_mutants", "subsuming score undefined: no subsuming mutants");

  BitRow suite_row(matrix.test_count());
  for (const auto& tid : suite) {
    auto ti = matrix.test_index(tid);
    if (!ti) throw Error("unmatched_test_id", "unmatched test id '" + tid + "'");
    suite_row.set(*ti);
  }

  std::size_t killed = 0;
  for (std::size_t mi = 0; mi < matrix.mutant_count(); ++mi)
    if (labels.fate[mi] == MutantFate::Subsuming && matrix.row(mi).intersects(suite_row)) ++killed;
  return static_cast<double>(killed) / static_cast<double>(total);
}

double plain_score(const std::vector<std::string>& suite, const KillMatrix& matrix) {
  if (matrix.mutant_count() == 0)
    throw Error("empty_matrix", "plain score undefined: no mutants");
  BitRow suite_row(matrix.test_count());
  for (const auto& tid : suite) {
    auto ti = matrix.test_index(tid);
    if (!ti) throw Error("unmatched_test_id", "unmatched test id '" + tid + "'");
    suite_row.set(*ti);
  }
  std::size_t killed = 0;
  for (std::size_t mi = 0; mi < matrix.mutant_count(); ++mi)
    if (matrix.row(mi).intersects(suite_row)) ++killed;
  return static_cast<double>(killed) / static_cast<double>(matrix.mutant_count());
}

std::map<std::string, SeqLabel> to_sn_labels(const GroundTruth& labels, const KillMatrix& matrix) {
  std::map<std::string, SeqLabel> out;
  for (std::size_t mi = 0; mi < matrix.mutant_count(); ++mi)
    out[matrix.mutant_ids()[mi]] =
        labels.fate[mi] == MutantFate::Subsuming ? SeqLabel::S : SeqLabel::N;
  return out;
}

void write_graph_json(const LabelingResult& result, const KillMatrix& matrix,
                      const std::filesystem::path& file) {
  nlohmann::ordered_json j;
  j["groups"] = nlohmann::ordered_json::array();
  for (const auto& g : result.graph.groups) {
    nlohmann::ordered_json group;
    group["mutants"] = nlohmann::ordered_json::array();
    for (std::size_t mi : g.mutants) group["mutants"].push_back(matrix.mutant_ids()[mi]);
    group["kill_set"] = nlohmann::ordered_json::array();
    for (std::size_t ti = 0; ti < matrix.test_count(); ++ti)
      if (g.kill_set.test(ti)) group["kill_set"].push_back(matrix.test_ids()[ti]);
    j["groups"].push_back(std::move(group));
  }
  j["edges"] = nlohmann::ordered_json::array();
  for (const auto& [a, b] : result.graph.edges)
    j["edges"].push_back(nlohmann::ordered_json::array({a, b}));
  j["equivalent"] = nlohmann::ordered_json::array();
  for (std::size_t mi = 0; mi < matrix.mutant_count(); ++mi)
    if (result.labels.fate[mi] == MutantFate::Equivalent)
      j["equivalent"].push_back(matrix.mutant_ids()[mi]);
  write_file(file, j.dump(2) + "\n");
}

}  // namespace mutlab
