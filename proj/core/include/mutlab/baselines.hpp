#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mutlab/corpus.hpp"

namespace mutlab {

struct EnsembleConfig {
  int rounds = 100;
  int max_depth = 3;
  double learning_rate = 0.1;
  double subsample = 0.8;
  int min_leaf = 1;
  bool one_hot = false;  // expand categorical columns instead of code thresholds
  std::uint64_t seed = 0;
};

struct TreeNode {
  int feature = -1;       // -1 for leaves
  double threshold = 0;
  int left = -1;
  int right = -1;
  double value = 0;       // leaf output
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // node 0 is the root
  double predict(std::span<const double> features) const;
};

// Stochastic gradient boosted decision trees over logistic loss.
class TreeEnsemble {
 public:
  // labels are 0/1; both classes must be present. round_loss, when given,
  // receives the full-data training loss after each boosting round.
  static TreeEnsemble train(const FeatureTable& features, const std::vector<int>& labels,
                            const EnsembleConfig& config, std::vector<double>* round_loss = nullptr);

  // Logistic of intercept plus learning-rate-scaled tree outputs. The feature
  // schema must match the training schema.
  double predict_proba(const FeatureSchema& schema, std::span<const double> features) const;

  double intercept() const { return intercept_; }
  std::size_t tree_count() const { return trees_.size(); }
  const FeatureSchema& schema() const { return schema_; }

  void save(const std::filesystem::path& file) const;
  static TreeEnsemble load(const std::filesystem::path& file);

 private:
  double intercept_ = 0;
  double learning_rate_ = 0.1;
  std::vector<RegressionTree> trees_;
  FeatureSchema schema_;
  bool one_hot_ = false;
  std::vector<int> category_cardinality_;  // per input column when one_hot_

  std::vector<double> encode(std::span<const double> features) const;
  friend struct EnsembleSerde;
};

struct Ranking {
  std::vector<std::string> ids;     // highest priority first
  std::vector<double> scores;       // non-increasing
};

// Descending probability; ties broken by mutant_id lexicographic order.
Ranking rank_by_probability(const TreeEnsemble& ensemble, const FeatureTable& candidates);

// Uniform permutation of the candidate set, deterministic per seed.
Ranking random_rank(std::vector<std::string> candidates, std::uint64_t seed);

}  // namespace mutlab
