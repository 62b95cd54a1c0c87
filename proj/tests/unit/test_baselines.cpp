#include <doctest.h>

#include <filesystem>
#include <map>

#include "mutlab/baselines.hpp"
#include "mutlab/error.hpp"
#include "mutlab/rng.hpp"
#include "mutlab/textio.hpp"

using namespace mutlab;
namespace fs = std::filesystem;

namespace {

// label = 1 iff BlockDepth (column 3) > 0.5; everything else is noise
FeatureTable planted_features(int n, std::uint64_t seed, std::vector<int>* labels) {
  FeatureTable table;
  table.schema.names = standard_feature_names();
  for (const auto& name : table.schema.names)
    table.schema.categorical.push_back(name.size() > 4 &&
                                       name.compare(name.size() - 4, 4, "Type") == 0);
  Rng rng(seed);
  for (int i = 0; i < n; ++i) {
    std::vector<double> row;
    for (std::size_t c = 0; c < table.schema.names.size(); ++c)
      row.push_back(table.schema.categorical[c] ? static_cast<double>(rng.below(6)) : rng.unit());
    labels->push_back(row[3] > 0.5 ? 1 : 0);
    table.mutant_ids.push_back("m" + std::to_string(i));
    table.values.push_back(std::move(row));
  }
  return table;
}

FeatureTable slice(const FeatureTable& t, std::size_t from, std::size_t to) {
  FeatureTable out;
  out.schema = t.schema;
  out.mutant_ids.assign(t.mutant_ids.begin() + from, t.mutant_ids.begin() + to);
  out.values.assign(t.values.begin() + from, t.values.begin() + to);
  return out;
}

}  // namespace

TEST_CASE("planted feature corpus trains to high held-out accuracy") {
  std::vector<int> labels;
  FeatureTable table = planted_features(500, 42, &labels);
  FeatureTable train = slice(table, 0, 300);
  FeatureTable test = slice(table, 300, 500);
  std::vector<int> train_labels(labels.begin(), labels.begin() + 300);

  EnsembleConfig config;
  config.seed = 7;
  TreeEnsemble model = TreeEnsemble::train(train, train_labels, config);

  int correct = 0;
  for (std::size_t i = 0; i < test.values.size(); ++i) {
    double p = model.predict_proba(test.schema, test.values[i]);
    int predicted = p > 0.5 ? 1 : 0;
    if (predicted == labels[300 + i]) ++correct;
  }
  CHECK(static_cast<double>(correct) / 200.0 >= 0.95);
}

TEST_CASE("zero boosting rounds gives the prior rate") {
  std::vector<int> labels;
  FeatureTable table = planted_features(40, 3, &labels);
  // force a known prior: 10 positives of 40
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = i < 10 ? 1 : 0;

  EnsembleConfig config;
  config.rounds = 0;
  config.seed = 1;
  TreeEnsemble model = TreeEnsemble::train(table, labels, config);
  CHECK(model.tree_count() == 0);
  CHECK(model.predict_proba(table.schema, table.values[0]) ==
        doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("balanced intercept-only model scores one half") {
  std::vector<int> labels;
  FeatureTable table = planted_features(40, 4, &labels);
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = i % 2 == 0 ? 1 : 0;
  EnsembleConfig config;
  config.rounds = 0;
  config.seed = 1;
  TreeEnsemble model = TreeEnsemble::train(table, labels, config);
  CHECK(model.predict_proba(table.schema, table.values[7]) == 0.5);
}

TEST_CASE("same seed trains an identical ensemble") {
  std::vector<int> labels;
  FeatureTable table = planted_features(150, 8, &labels);
  EnsembleConfig config;
  config.seed = 99;
  config.rounds = 25;

  fs::path dir = fs::temp_directory_path() / "mutlab_test_trees";
  fs::create_directories(dir);
  TreeEnsemble::train(table, labels, config).save(dir / "a.json");
  TreeEnsemble::train(table, labels, config).save(dir / "b.json");
  CHECK(read_file(dir / "a.json") == read_file(dir / "b.json"));

  SUBCASE("reloaded model predicts identically") {
    TreeEnsemble loaded = TreeEnsemble::load(dir / "a.json");
    TreeEnsemble fresh = TreeEnsemble::train(table, labels, config);
    for (std::size_t i = 0; i < 20; ++i)
      CHECK(loaded.predict_proba(table.schema, table.values[i]) ==
            doctest::Approx(fresh.predict_proba(table.schema, table.values[i])).epsilon(1e-12));
  }
}

TEST_CASE("probabilities stay inside the unit interval") {
  std::vector<int> labels;
  FeatureTable table = planted_features(200, 5, &labels);
  EnsembleConfig config;
  config.seed = 2;
  config.rounds = 40;
  TreeEnsemble model = TreeEnsemble::train(table, labels, config);

  Rng rng(6);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> probe;
    for (std::size_t c = 0; c < table.schema.names.size(); ++c)
      probe.push_back(rng.unit() * 10 - 5);
    double p = model.predict_proba(table.schema, probe);
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
  }
}

TEST_CASE("schema mismatch is rejected") {
  std::vector<int> labels;
  FeatureTable table = planted_features(50, 9, &labels);
  EnsembleConfig config;
  config.seed = 3;
  config.rounds = 5;
  TreeEnsemble model = TreeEnsemble::train(table, labels, config);

  FeatureSchema other = table.schema;
  other.names[0] = "somethingElse";
  CHECK_THROWS_AS(model.predict_proba(other, table.values[0]), Error);
}

TEST_CASE("single-class labels are rejected") {
  std::vector<int> labels;
  FeatureTable table = planted_features(30, 10, &labels);
  std::fill(labels.begin(), labels.end(), 1);
  EnsembleConfig config;
  config.seed = 4;
  CHECK_THROWS_AS(TreeEnsemble::train(table, labels, config), Error);
}

TEST_CASE("boosting loss never increases on full-sample rounds") {
  std::vector<int> labels;
  FeatureTable table = planted_features(250, 11, &labels);
  EnsembleConfig config;
  config.seed = 5;
  config.subsample = 1.0;
  std::vector<double> losses;
  TreeEnsemble::train(table, labels, config, &losses);
  REQUIRE(losses.size() == 100);
  for (std::size_t i = 1; i < losses.size(); ++i) CHECK(losses[i] <= losses[i - 1] + 1e-12);
}

TEST_CASE("one-hot mode trains and predicts") {
  std::vector<int> labels;
  FeatureTable table = planted_features(200, 12, &labels);
  EnsembleConfig config;
  config.seed = 6;
  config.one_hot = true;
  config.rounds = 30;
  TreeEnsemble model = TreeEnsemble::train(table, labels, config);
  double p = model.predict_proba(table.schema, table.values[0]);
  CHECK(p >= 0.0);
  CHECK(p <= 1.0);
}

TEST_CASE("probability ranking breaks ties lexicographically") {
  std::vector<int> labels;
  FeatureTable table = planted_features(100, 13, &labels);
  EnsembleConfig config;
  config.seed = 7;
  config.rounds = 30;
  TreeEnsemble model = TreeEnsemble::train(table, labels, config);

  // identical feature rows land in identical leaves, so a and c tie
  FeatureTable candidates;
  candidates.schema = table.schema;
  std::vector<double> high = table.values[0];
  high[3] = 0.95;
  std::vector<double> low = table.values[1];
  low[3] = 0.05;
  candidates.mutant_ids = {"c", "b", "a"};
  candidates.values = {high, low, high};

  Ranking r = rank_by_probability(model, candidates);
  REQUIRE(r.ids.size() == 3);
  CHECK(r.ids[0] == "a");
  CHECK(r.ids[1] == "c");
  CHECK(r.ids[2] == "b");
  CHECK(r.scores[0] == r.scores[1]);
  CHECK(r.scores[1] > r.scores[2]);

  SUBCASE("all-equal probabilities order lexicographically") {
    candidates.values = {high, high, high};
    Ranking tied = rank_by_probability(model, candidates);
    CHECK(tied.ids == std::vector<std::string>{"a", "b", "c"});
  }
}

TEST_CASE("rankings are permutations of the candidate set") {
  std::vector<int> labels;
  FeatureTable table = planted_features(60, 14, &labels);
  EnsembleConfig config;
  config.seed = 8;
  config.rounds = 15;
  TreeEnsemble model = TreeEnsemble::train(table, labels, config);
  Ranking r = rank_by_probability(model, table);
  std::vector<std::string> sorted_ids = r.ids;
  std::sort(sorted_ids.begin(), sorted_ids.end());
  std::vector<std::string> expect = table.mutant_ids;
  std::sort(expect.begin(), expect.end());
  CHECK(sorted_ids == expect);
  for (std::size_t i = 1; i < r.scores.size(); ++i) CHECK(r.scores[i] <= r.scores[i - 1]);
}

TEST_CASE("random ranking basics") {
  Ranking one = random_rank({"solo"}, 5);
  CHECK(one.ids == std::vector<std::string>{"solo"});

  Ranking a = random_rank({"x", "y", "z"}, 123);
  Ranking b = random_rank({"z", "y", "x"}, 123);  // input order must not matter
  CHECK(a.ids == b.ids);
  bool some_seed_differs = false;
  for (std::uint64_t seed = 124; seed < 134; ++seed)
    if (random_rank({"x", "y", "z"}, seed).ids != a.ids) some_seed_differs = true;
  CHECK(some_seed_differs);
}

TEST_CASE("random rankings are uniform over permutations") {
  std::map<std::string, int> counts;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    Ranking r = random_rank({"x", "y", "z"}, seed);
    counts[r.ids[0] + r.ids[1] + r.ids[2]]++;
  }
  REQUIRE(counts.size() == 6);
  // expected 10000/6 with sigma = sqrt(n p (1-p)) ~ 37.3; allow 3 sigma
  for (const auto& [perm, count] : counts) {
    CHECK(count > 1555);
    CHECK(count < 1779);
  }
}
