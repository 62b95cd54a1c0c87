#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mutlab/abstraction.hpp"
#include "mutlab/bitrow.hpp"

namespace mutlab {

struct MutantRecord {
  std::string mutant_id;
  std::string project_id;
  std::string unit_path;
  std::size_t statement_index = 0;
  std::string operator_name;          // e.g. "ReturnValsMutator"
  std::optional<SeqLabel> label;      // ground truth, absent before labeling
};

// Mutants x tests boolean incidence. Rows are bit rows over the test axis;
// on disk the matrix is a sparse (mutant_id, test_id) pair list.
class KillMatrix {
 public:
  KillMatrix() = default;
  KillMatrix(std::vector<std::string> mutant_ids, std::vector<std::string> test_ids);

  void add_kill(const std::string& mutant_id, const std::string& test_id,
                const std::string& context);

  std::size_t mutant_count() const { return mutant_ids_.size(); }
  std::size_t test_count() const { return test_ids_.size(); }
  const std::vector<std::string>& mutant_ids() const { return mutant_ids_; }
  const std::vector<std::string>& test_ids() const { return test_ids_; }

  const BitRow& row(std::size_t mutant) const { return rows_[mutant]; }
  bool kills(std::size_t mutant, std::size_t test) const { return rows_[mutant].test(test); }

  std::optional<std::size_t> mutant_index(const std::string& id) const;
  std::optional<std::size_t> test_index(const std::string& id) const;

  friend bool operator==(const KillMatrix& a, const KillMatrix& b);

 private:
  std::vector<std::string> mutant_ids_;
  std::vector<std::string> test_ids_;
  std::unordered_map<std::string, std::size_t> mutant_index_;
  std::unordered_map<std::string, std::size_t> test_index_;
  std::vector<BitRow> rows_;
};

struct SourceUnit {
  std::string path;        // identifier, relative to the corpus root
  std::string project_id;
  std::string text;
  std::size_t statement_count = 0;
};

struct FeatureSchema {
  std::vector<std::string> names;
  std::vector<bool> categorical;  // integer-coded categorical columns

  bool operator==(const FeatureSchema&) const = default;
};

struct FeatureTable {
  FeatureSchema schema;
  std::vector<std::string> mutant_ids;
  std::vector<std::vector<double>> values;  // one row per mutant id

  std::optional<std::size_t> index_of(const std::string& mutant_id) const;
  bool operator==(const FeatureTable&) const = default;
};

// The 16 feature names emitted by the bundled fixture generator. Columns
// whose name ends in "Type" hold integer category codes.
const std::vector<std::string>& standard_feature_names();

struct Corpus {
  std::filesystem::path root;
  std::vector<SourceUnit> units;
  std::vector<MutantRecord> mutants;
  KillMatrix kills;
  std::optional<FeatureTable> features;
  std::vector<std::string> project_ids;  // sorted, unique

  const SourceUnit& unit_of(const MutantRecord& m) const;
  std::optional<std::size_t> mutant_index(const std::string& id) const;
  std::size_t labeled_count() const;

 private:
  friend Corpus load_corpus(const std::filesystem::path&);
  std::unordered_map<std::string, std::size_t> unit_index_;
  std::unordered_map<std::string, std::size_t> mutant_index_;
};

// Loads and cross-links a corpus directory: manifest.json names the units,
// the mutants file, the matrix file and optional features/labels files.
// Every mutant must reference an existing unit, a valid statement and a
// matrix row; violations raise Error with the offending file and line.
Corpus load_corpus(const std::filesystem::path& root);

// Writes a corpus back out in the on-disk layout load_corpus reads.
void save_corpus(const Corpus& corpus, const std::filesystem::path& root);

// mutant_id,label rows with label in {S,N}.
void save_labels(const std::map<std::string, SeqLabel>& labels, const std::filesystem::path& file);
std::map<std::string, SeqLabel> load_labels(const std::filesystem::path& file);

struct FoldSplit {
  int fold_count = 0;
  std::map<std::string, int> assignments;  // project_id -> fold

  std::vector<std::string> projects_in(int fold) const;
};

// Partitions projects into k folds as evenly as possible, deterministically
// for a given seed. Programs of one project always share a fold.
FoldSplit make_folds(const Corpus& corpus, int k, std::uint64_t seed);

void save_folds(const FoldSplit& folds, const std::filesystem::path& file);
FoldSplit load_folds(const std::filesystem::path& file);

// Reserves the last training fold for validation; the rest train.
// Requires at least two folds on the training side.
std::pair<std::vector<int>, int> split_train_valid(const std::vector<int>& train_folds);

}  // namespace mutlab
