#include "mutlab/baselines.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "mutlab/error.hpp"
#include "mutlab/rng.hpp"
#include "mutlab/textio.hpp"

namespace mutlab {

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

constexpr double kMaxLeafValue = 10.0;
constexpr double kMinHessian = 1e-12;

struct SplitResult {
  bool found = false;
  int feature = -1;
  double threshold = 0;
  double gain = 0;
};

struct TreeBuilder {
  const std::vector<std::vector<double>>& rows;
  const std::vector<double>& residual;
  const std::vector<double>& hessian;
  int max_depth;
  int min_leaf;
  std::vector<TreeNode> nodes;

  double leaf_value(const std::vector<std::size_t>& idx) const {
    double g = 0, h = 0;
    for (std::size_t i : idx) {
      g += residual[i];
      h += hessian[i];
    }
    double v = g / std::max(h, kMinHessian);
    return std::clamp(v, -kMaxLeafValue, kMaxLeafValue);
  }

  SplitResult best_split(const std::vector<std::size_t>& idx) const {
    SplitResult best;
    double g_total = 0, h_total = 0;
    for (std::size_t i : idx) {
      g_total += residual[i];
      h_total += hessian[i];
    }
    double parent = g_total * g_total / std::max(h_total, kMinHessian);

    const std::size_t n_features = rows[idx[0]].size();
    std::vector<std::size_t> sorted = idx;
    for (std::size_t f = 0; f < n_features; ++f) {
      std::sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) {
        if (rows[a][f] != rows[b][f]) return rows[a][f] < rows[b][f];
        return a < b;
      });
      double gl = 0, hl = 0;
      for (std::size_t pos = 0; pos + 1 < sorted.size(); ++pos) {
        gl += residual[sorted[pos]];
        hl += hessian[sorted[pos]];
        if (rows[sorted[pos]][f] == rows[sorted[pos + 1]][f]) continue;
        std::size_t left_n = pos + 1;
        std::size_t right_n = sorted.size() - left_n;
        if (left_n < static_cast<std::size_t>(min_leaf) ||
            right_n < static_cast<std::size_t>(min_leaf))
          continue;
        double gr = g_total - gl, hr = h_total - hl;
        double gain = gl * gl / std::max(hl, kMinHessian) +
                      gr * gr / std::max(hr, kMinHessian) - parent;
        if (gain > best.gain + 1e-12) {
          best.found = true;
          best.feature = static_cast<int>(f);
          best.threshold = (rows[sorted[pos]][f] + rows[sorted[pos + 1]][f]) / 2.0;
          best.gain = gain;
        }
      }
    }
    return best;
  }

  int build(const std::vector<std::size_t>& idx, int depth) {
    int id = static_cast<int>(nodes.size());
    nodes.push_back(TreeNode{});
    if (depth >= max_depth || idx.size() < 2 * static_cast<std::size_t>(min_leaf)) {
      nodes[static_cast<std::size_t>(id)].value = leaf_value(idx);
      return id;
    }
    SplitResult split = best_split(idx);
    if (!split.found) {
      nodes[static_cast<std::size_t>(id)].value = leaf_value(idx);
      return id;
    }
    std::vector<std::size_t> left, right;
    for (std::size_t i : idx)
      (rows[i][static_cast<std::size_t>(split.feature)] < split.threshold ? left : right)
          .push_back(i);
    int l = build(left, depth + 1);
    int r = build(right, depth + 1);
    TreeNode& node = nodes[static_cast<std::size_t>(id)];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = l;
    node.right = r;
    return id;
  }
};

}  // namespace

double RegressionTree::predict(std::span<const double> features) const {
  std::size_t at = 0;
  while (nodes[at].feature >= 0) {
    const TreeNode& n = nodes[at];
    at = static_cast<std::size_t>(
        features[static_cast<std::size_t>(n.feature)] < n.threshold ? n.left : n.right);
  }
  return nodes[at].value;
}

std::vector<double> TreeEnsemble::encode(std::span<const double> features) const {
  if (!one_hot_) return {features.begin(), features.end()};
  std::vector<double> out;
  for (std::size_t c = 0; c < features.size(); ++c) {
    if (schema_.categorical[c]) {
      int card = category_cardinality_[c];
      std::vector<double> block(static_cast<std::size_t>(card), 0.0);
      auto code = static_cast<long long>(features[c]);
      if (code >= 0 && code < card) block[static_cast<std::size_t>(code)] = 1.0;
      out.insert(out.end(), block.begin(), block.end());
    } else {
      out.push_back(features[c]);
    }
  }
  return out;
}

TreeEnsemble TreeEnsemble::train(const FeatureTable& features, const std::vector<int>& labels,
                                 const EnsembleConfig& config, std::vector<double>* round_loss) {
  const std::size_t n = features.values.size();
  if (n == 0) throw Error("empty_training_set", "no feature rows");
  if (labels.size() != n)
    throw Error("id_mismatch", "label count does not match feature row count");

  double positives = 0;
  for (int y : labels) positives += y;
  if (positives == 0 || positives == static_cast<double>(n))
    throw Error("single_class", "training labels hold only one class");

  TreeEnsemble model;
  model.schema_ = features.schema;
  model.learning_rate_ = config.learning_rate;
  model.one_hot_ = config.one_hot;
  model.category_cardinality_.assign(features.schema.names.size(), 0);
  if (config.one_hot) {
    for (std::size_t c = 0; c < features.schema.names.size(); ++c) {
      if (!features.schema.categorical[c]) continue;
      long long max_code = 0;
      for (const auto& row : features.values)
        max_code = std::max(max_code, static_cast<long long>(row[c]));
      model.category_cardinality_[c] = static_cast<int>(max_code) + 1;
    }
  }

  std::vector<std::vector<double>> rows;
  rows.reserve(n);
  for (const auto& row : features.values)
    rows.push_back(model.one_hot_ ? model.encode(row) : row);

  double prior = std::clamp(positives / static_cast<double>(n), 1e-6, 1.0 - 1e-6);
  model.intercept_ = std::log(prior / (1.0 - prior));

  std::vector<double> margin(n, model.intercept_);
  std::vector<double> residual(n), hessian(n);
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;

  auto full_loss = [&]() {
    double loss = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double z = margin[i];
      loss += std::max(z, 0.0) - labels[i] * z + std::log1p(std::exp(-std::abs(z)));
    }
    return loss / static_cast<double>(n);
  };

  for (int round = 0; round < config.rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      double p = sigmoid(margin[i]);
      residual[i] = labels[i] - p;
      hessian[i] = std::max(p * (1.0 - p), kMinHessian);
    }

    std::vector<std::size_t> sample = all;
    if (config.subsample < 1.0) {
      Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(round)));
      rng.shuffle(sample);
      auto keep = std::max<std::size_t>(
          1, static_cast<std::size_t>(config.subsample * static_cast<double>(n)));
      sample.resize(keep);
      std::sort(sample.begin(), sample.end());
    }

    TreeBuilder builder{rows, residual, hessian, config.max_depth, config.min_leaf, {}};
    builder.build(sample, 0);
    RegressionTree tree{std::move(builder.nodes)};

    for (std::size_t i = 0; i < n; ++i)
      margin[i] += config.learning_rate * tree.predict(rows[i]);
    model.trees_.push_back(std::move(tree));
    if (round_loss) round_loss->push_back(full_loss());
  }
  return model;
}

double TreeEnsemble::predict_proba(const FeatureSchema& schema,
                                   std::span<const double> features) const {
  if (!(schema == schema_))
    throw Error("schema_mismatch", "feature schema does not match the trained model");
  if (features.size() != schema_.names.size())
    throw Error("schema_mismatch", "feature vector length does not match schema");
  std::vector<double> encoded = encode(features);
  double z = intercept_;
  for (const auto& tree : trees_) z += learning_rate_ * tree.predict(encoded);
  return sigmoid(z);
}

struct EnsembleSerde {
  static nlohmann::ordered_json to_json(const TreeEnsemble& m) {
    nlohmann::ordered_json j;
    j["backend"] = "boosted-trees";
    j["intercept"] = m.intercept_;
    j["learning_rate"] = m.learning_rate_;
    j["one_hot"] = m.one_hot_;
    j["category_cardinality"] = m.category_cardinality_;
    j["schema"] = {{"names", m.schema_.names},
                   {"categorical", std::vector<int>(m.schema_.categorical.begin(),
                                                    m.schema_.categorical.end())}};
    j["trees"] = nlohmann::ordered_json::array();
    for (const auto& tree : m.trees_) {
      nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
      for (const auto& n : tree.nodes)
        nodes.push_back({{"feature", n.feature},
                         {"threshold", n.threshold},
                         {"left", n.left},
                         {"right", n.right},
                         {"value", n.value}});
      j["trees"].push_back(std::move(nodes));
    }
    return j;
  }

  static TreeEnsemble from_json(const nlohmann::ordered_json& j, const std::string& context) {
    if (j.is_discarded() || !j.contains("backend") || j["backend"] != "boosted-trees")
      throw Error("malformed_model", context + ": not a boosted-trees model");
    TreeEnsemble m;
    m.intercept_ = j.at("intercept").get<double>();
    m.learning_rate_ = j.at("learning_rate").get<double>();
    m.one_hot_ = j.at("one_hot").get<bool>();
    m.category_cardinality_ = j.at("category_cardinality").get<std::vector<int>>();
    m.schema_.names = j.at("schema").at("names").get<std::vector<std::string>>();
    for (int c : j.at("schema").at("categorical").get<std::vector<int>>())
      m.schema_.categorical.push_back(c != 0);
    for (const auto& tj : j.at("trees")) {
      RegressionTree tree;
      for (const auto& nj : tj)
        tree.nodes.push_back(TreeNode{nj.at("feature").get<int>(),
                                      nj.at("threshold").get<double>(), nj.at("left").get<int>(),
                                      nj.at("right").get<int>(), nj.at("value").get<double>()});
      m.trees_.push_back(std::move(tree));
    }
    return m;
  }
};

void TreeEnsemble::save(const std::filesystem::path& file) const {
  write_file(file, EnsembleSerde::to_json(*this).dump() + "\n");
}

TreeEnsemble TreeEnsemble::load(const std::filesystem::path& file) {
  auto j = nlohmann::ordered_json::parse(read_file(file), nullptr, false);
  return EnsembleSerde::from_json(j, file.string());
}

Ranking rank_by_probability(const TreeEnsemble& ensemble, const FeatureTable& candidates) {
  if (candidates.mutant_ids.empty())
    throw Error("empty_selection", "no candidates to rank");
  std::vector<std::size_t> order(candidates.mutant_ids.size());
  std::vector<double> probs(candidates.mutant_ids.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    order[i] = i;
    probs[i] = ensemble.predict_proba(candidates.schema, candidates.values[i]);
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (probs[a] != probs[b]) return probs[a] > probs[b];
    return candidates.mutant_ids[a] < candidates.mutant_ids[b];
  });
  Ranking r;
  for (std::size_t i : order) {
    r.ids.push_back(candidates.mutant_ids[i]);
    r.scores.push_back(probs[i]);
  }
  return r;
}

Ranking random_rank(std::vector<std::string> candidates, std::uint64_t seed) {
  if (candidates.empty()) throw Error("empty_selection", "no candidates to rank");
  std::sort(candidates.begin(), candidates.end());
  Rng rng(seed);
  rng.shuffle(candidates);
  Ranking r;
  r.ids = std::move(candidates);
  r.scores.assign(r.ids.size(), 0.0);
  for (std::size_t i = 0; i < r.scores.size(); ++i)
    r.scores[i] = 1.0 - static_cast<double>(i) / static_cast<double>(r.scores.size());
  return r;
}

}  // namespace mutlab
