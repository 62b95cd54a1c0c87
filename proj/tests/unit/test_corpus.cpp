#include <doctest.h>

#include <filesystem>
#include <set>

#include "mutlab/corpus.hpp"
#include "mutlab/error.hpp"
#include "mutlab/rng.hpp"
#include "mutlab/synth.hpp"
#include "mutlab/textio.hpp"

using namespace mutlab;
namespace fs = std::filesystem;

namespace {

fs::path data_dir() { return fs::path(MUTLAB_TEST_DATA_DIR); }

fs::path temp_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("mutlab_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("bundled tiny corpus loads fully cross-linked") {
  Corpus corpus = load_corpus(data_dir() / "tiny");
  CHECK(corpus.mutants.size() == 3);
  CHECK(corpus.kills.mutant_count() == 3);
  CHECK(corpus.kills.test_count() == 3);
  CHECK(corpus.units.size() == 1);
  CHECK(corpus.project_ids == std::vector<std::string>{"clamp"});
  for (const auto& m : corpus.mutants) {
    const SourceUnit& unit = corpus.unit_of(m);
    CHECK(m.statement_index < unit.statement_count);
  }
}

TEST_CASE("kill pair with unknown mutant id is rejected") {
  fs::path dir = temp_dir("bad_kill");
  fs::copy(data_dir() / "tiny", dir, fs::copy_options::recursive |
                                          fs::copy_options::overwrite_existing);
  write_file(dir / "kills.csv", "mutant_id,test_id\nm1,t1\nm9,t2\n");
  CHECK_THROWS_WITH_AS(load_corpus(dir), doctest::Contains("unmatched mutant id"), Error);
}

TEST_CASE("missing manifest is reported") {
  CHECK_THROWS_WITH_AS(load_corpus(temp_dir("empty")), doctest::Contains("manifest.json"), Error);
}

TEST_CASE("duplicate test ids in the manifest are rejected") {
  fs::path dir = temp_dir("dup_test");
  fs::copy(data_dir() / "tiny", dir, fs::copy_options::recursive |
                                          fs::copy_options::overwrite_existing);
  std::string manifest = read_file(dir / "manifest.json");
  std::size_t at = manifest.find("\"t3\"");
  REQUIRE(at != std::string::npos);
  manifest.replace(at, 4, "\"t1\"");
  write_file(dir / "manifest.json", manifest);
  CHECK_THROWS_WITH_AS(load_corpus(dir), doctest::Contains("duplicate test id"), Error);
}

TEST_CASE("feature rows with the wrong column count carry a line number") {
  fs::path dir = temp_dir("bad_features");
  fs::copy(data_dir() / "tiny", dir, fs::copy_options::recursive |
                                          fs::copy_options::overwrite_existing);
  std::string manifest = read_file(dir / "manifest.json");
  manifest.replace(manifest.find("\"labels\""), 8, "\"features\": \"features.csv\",\n  \"labels\"");
  write_file(dir / "manifest.json", manifest);
  write_file(dir / "features.csv", "mutant_id,MutantType,NumInBlock\nm1,1,2\nm2,3\n");
  CHECK_THROWS_WITH_AS(load_corpus(dir), doctest::Contains("features.csv:3"), Error);
}

TEST_CASE("operator names with separators are rejected") {
  fs::path dir = temp_dir("bad_operator");
  fs::copy(data_dir() / "tiny", dir, fs::copy_options::recursive |
                                          fs::copy_options::overwrite_existing);
  std::string line =
      R"({"mutant_id":"m1","project_id":"clamp","unit_path":"units/clamp.mini","statement_index":1,"operator":"Math Mutator"})";
  write_file(dir / "mutants.jsonl", line + "\n");
  write_file(dir / "kills.csv", "mutant_id,test_id\n");
  CHECK_THROWS_WITH_AS(load_corpus(dir), doctest::Contains("separator"), Error);
}

TEST_CASE("labels outside {S,N} are rejected") {
  fs::path dir = temp_dir("bad_labels");
  fs::copy(data_dir() / "tiny", dir, fs::copy_options::recursive |
                                          fs::copy_options::overwrite_existing);
  write_file(dir / "labels.csv", "mutant_id,label\nm1,S\nm2,X\n");
  CHECK_THROWS_WITH_AS(load_corpus(dir), doctest::Contains("label must be S or N"), Error);
}

TEST_CASE("mutant referencing a missing statement is rejected") {
  fs::path dir = temp_dir("bad_stmt");
  fs::copy(data_dir() / "tiny", dir, fs::copy_options::recursive |
                                          fs::copy_options::overwrite_existing);
  std::string line =
      R"({"mutant_id":"m1","project_id":"clamp","unit_path":"units/clamp.mini","statement_index":99,"operator":"MathMutator"})";
  write_file(dir / "mutants.jsonl", line + "\n");
  write_file(dir / "kills.csv", "mutant_id,test_id\n");
  CHECK_THROWS_WITH_AS(load_corpus(dir), doctest::Contains("out of range"), Error);
}

TEST_CASE("generated corpus features cover every mutant") {
  fs::path dir = temp_dir("gen_features");
  ToyCorpusConfig config;
  config.projects = 2;
  config.units_per_project = 1;
  config.functions_per_unit = 2;
  config.seed = 7;
  write_toy_corpus(dir, config);
  Corpus corpus = load_corpus(dir);
  CHECK(corpus.project_ids.size() == 2);
  CHECK(corpus.mutants.size() >= 10);
  REQUIRE(corpus.features.has_value());
  CHECK(corpus.features->schema.names == standard_feature_names());
  CHECK(corpus.features->mutant_ids.size() == corpus.mutants.size());
}

TEST_CASE("authored two-project corpus loads with twenty mutants") {
  Corpus corpus;
  for (int p = 0; p < 2; ++p) {
    SourceUnit unit;
    unit.path = "units/p" + std::to_string(p) + ".mini";
    unit.project_id = "proj" + std::to_string(p);
    unit.text = "int f ( int a ) {\n  return a ;\n}\n";
    unit.statement_count = statement_count(tokenize(unit.text));
    corpus.units.push_back(std::move(unit));
  }
  std::vector<std::string> mutant_ids;
  for (int p = 0; p < 2; ++p)
    for (int m = 0; m < 10; ++m) {
      MutantRecord rec;
      rec.mutant_id = "p" + std::to_string(p) + "_m" + std::to_string(m);
      rec.project_id = "proj" + std::to_string(p);
      rec.unit_path = "units/p" + std::to_string(p) + ".mini";
      rec.statement_index = static_cast<std::size_t>(m % 2);
      rec.operator_name = "MathMutator";
      mutant_ids.push_back(rec.mutant_id);
      corpus.mutants.push_back(std::move(rec));
    }
  corpus.project_ids = {"proj0", "proj1"};
  corpus.kills = KillMatrix(mutant_ids, {"t0", "t1"});

  fs::path dir = temp_dir("twoproj_exact");
  save_corpus(corpus, dir);
  Corpus loaded = load_corpus(dir);
  CHECK(loaded.mutants.size() == 20);
  CHECK(loaded.project_ids.size() == 2);
}

TEST_CASE("save then load round-trips a corpus field by field") {
  fs::path dir = temp_dir("roundtrip_src");
  ToyCorpusConfig config;
  config.projects = 3;
  config.units_per_project = 2;
  config.seed = 11;
  write_toy_corpus(dir, config);
  Corpus corpus = load_corpus(dir);
  // attach some labels so the labels file participates too
  corpus.mutants[0].label = SeqLabel::S;
  corpus.mutants[1].label = SeqLabel::N;

  fs::path copy = temp_dir("roundtrip_dst");
  save_corpus(corpus, copy);
  Corpus reloaded = load_corpus(copy);

  REQUIRE(reloaded.mutants.size() == corpus.mutants.size());
  for (std::size_t i = 0; i < corpus.mutants.size(); ++i) {
    CHECK(reloaded.mutants[i].mutant_id == corpus.mutants[i].mutant_id);
    CHECK(reloaded.mutants[i].project_id == corpus.mutants[i].project_id);
    CHECK(reloaded.mutants[i].unit_path == corpus.mutants[i].unit_path);
    CHECK(reloaded.mutants[i].statement_index == corpus.mutants[i].statement_index);
    CHECK(reloaded.mutants[i].operator_name == corpus.mutants[i].operator_name);
    CHECK(reloaded.mutants[i].label == corpus.mutants[i].label);
  }
  CHECK(reloaded.kills == corpus.kills);
  REQUIRE(reloaded.features.has_value());
  CHECK(*reloaded.features == *corpus.features);
  REQUIRE(reloaded.units.size() == corpus.units.size());
  for (std::size_t i = 0; i < corpus.units.size(); ++i) {
    CHECK(reloaded.units[i].path == corpus.units[i].path);
    CHECK(reloaded.units[i].text == corpus.units[i].text);
  }
}

TEST_CASE("folds partition projects evenly and deterministically") {
  fs::path dir = temp_dir("folds");
  ToyCorpusConfig config;
  config.projects = 5;
  config.units_per_project = 1;
  config.functions_per_unit = 2;
  config.seed = 3;
  write_toy_corpus(dir, config);
  Corpus corpus = load_corpus(dir);

  SUBCASE("five projects over five folds puts one project per fold") {
    FoldSplit folds = make_folds(corpus, 5, 42);
    for (int f = 0; f < 5; ++f) CHECK(folds.projects_in(f).size() == 1);
  }

  SUBCASE("ten projects over five folds puts two per fold") {
    // duplicate the corpus projects by renaming
    Corpus wide = corpus;
    wide.project_ids.clear();
    for (int i = 0; i < 10; ++i) wide.project_ids.push_back("proj" + std::to_string(i));
    FoldSplit folds = make_folds(wide, 5, 9);
    for (int f = 0; f < 5; ++f) CHECK(folds.projects_in(f).size() == 2);
  }

  SUBCASE("same seed twice gives identical assignments") {
    FoldSplit a = make_folds(corpus, 5, 77);
    FoldSplit b = make_folds(corpus, 5, 77);
    CHECK(a.assignments == b.assignments);
    FoldSplit c = make_folds(corpus, 5, 78);
    CHECK(a.assignments != c.assignments);
  }

  SUBCASE("more folds than projects is an error") {
    CHECK_THROWS_AS(make_folds(corpus, 6, 1), Error);
  }

  SUBCASE("folds cover all projects and are pairwise disjoint") {
    FoldSplit folds = make_folds(corpus, 3, 5);
    std::set<std::string> seen;
    for (int f = 0; f < 3; ++f)
      for (const auto& p : folds.projects_in(f)) CHECK(seen.insert(p).second);
    CHECK(seen.size() == corpus.project_ids.size());
  }

  SUBCASE("fold files round-trip") {
    FoldSplit folds = make_folds(corpus, 5, 13);
    fs::path file = dir / "folds.json";
    save_folds(folds, file);
    FoldSplit loaded = load_folds(file);
    CHECK(loaded.fold_count == folds.fold_count);
    CHECK(loaded.assignments == folds.assignments);
  }
}

TEST_CASE("validation fold is the last training fold") {
  auto [train, valid] = split_train_valid({0, 1, 2, 3});
  CHECK(train == std::vector<int>{0, 1, 2});
  CHECK(valid == 3);

  auto [train2, valid2] = split_train_valid({0, 1});
  CHECK(train2 == std::vector<int>{0});
  CHECK(valid2 == 1);

  CHECK_THROWS_AS(split_train_valid({0}), Error);
}

TEST_CASE("validation and training sides stay disjoint over random splits") {
  Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    int n = 2 + static_cast<int>(rng.below(8));
    std::vector<int> folds;
    for (int i = 0; i < n; ++i) folds.push_back(i);
    rng.shuffle(folds);
    auto [train, valid] = split_train_valid(folds);
    CHECK(train.size() + 1 == folds.size());
    for (int f : train) CHECK(f != valid);
  }
}

TEST_CASE("test fold projects never appear in the training side") {
  fs::path dir = temp_dir("foldprop");
  ToyCorpusConfig config;
  config.projects = 6;
  config.units_per_project = 1;
  config.functions_per_unit = 2;
  config.seed = 21;
  write_toy_corpus(dir, config);
  Corpus corpus = load_corpus(dir);
  FoldSplit folds = make_folds(corpus, 3, 17);
  for (int test_fold = 0; test_fold < 3; ++test_fold) {
    std::set<std::string> test_projects;
    for (const auto& p : folds.projects_in(test_fold)) test_projects.insert(p);
    for (const auto& m : corpus.mutants) {
      bool in_test = test_projects.count(m.project_id) > 0;
      bool fold_matches = folds.assignments.at(m.project_id) == test_fold;
      CHECK(in_test == fold_matches);
    }
  }
}
