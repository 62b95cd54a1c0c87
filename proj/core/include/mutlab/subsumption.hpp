#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mutlab/corpus.hpp"

namespace mutlab {

struct KillSet {
  std::string mutant_id;
  std::vector<std::string> tests;  // in matrix test order
};

// One KillSet per mutant: exactly the true entries of its matrix row.
std::vector<KillSet> kill_sets(const KillMatrix& matrix);

enum class MutantFate { Subsuming, Subsumed, Equivalent };

// Indistinguishable groups (identical kill sets) with strict-subset edges.
// Edge (a, b) means killset(group a) is a strict subset of killset(group b);
// source groups with nonempty kill sets are the subsuming ones.
struct SubsumptionGraph {
  struct Group {
    std::vector<std::size_t> mutants;  // matrix row indices
    BitRow kill_set;
  };
  std::vector<Group> groups;                        // killable mutants only
  std::vector<std::pair<std::size_t, std::size_t>> edges;
};

struct GroundTruth {
  std::vector<MutantFate> fate;  // by matrix row index

  std::size_t count(MutantFate f) const;
  bool operator==(const GroundTruth&) const = default;
};

struct LabelingResult {
  GroundTruth labels;
  SubsumptionGraph graph;
};

// Labels every mutant from the kill matrix: unkilled mutants are equivalent;
// a killable mutant is subsuming iff no other killable mutant's kill set is
// a strict subset of its own. All members of an indistinguishable group share
// a fate, so mutually subsuming mutants are all included.
LabelingResult subsuming_mutants(const KillMatrix& matrix);

// MS*: killed subsuming mutants over all subsuming mutants. suite holds test
// ids; throws if the labeling has no subsuming mutant.
double subsuming_score(const GroundTruth& labels, const std::vector<std::string>& suite,
                       const KillMatrix& matrix);

// Fraction of all mutants killed by the suite.
double plain_score(const std::vector<std::string>& suite, const KillMatrix& matrix);

// S for subsuming mutants, N otherwise.
std::map<std::string, SeqLabel> to_sn_labels(const GroundTruth& labels, const KillMatrix& matrix);

void write_graph_json(const LabelingResult& result, const KillMatrix& matrix,
                      const std::filesystem::path& file);

}  // namespace mutlab
