#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace mutlab::pipeline {

// Everything a subcommand needs; loaded from the JSON config file, then
// overridden by flags. All randomness derives from the one master seed.
struct RunConfig {
  std::filesystem::path corpus_dir;
  std::filesystem::path out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;

  int budget = 100;
  bool abstraction = true;
  std::string allowlist_file;

  int folds = 5;
  std::vector<std::string> strategies = {"learner", "tree", "random"};

  double target_ms = 1.0;
  int repetitions = 1000;
  std::size_t select_size = 0;  // 0: use the learner's predicted-S count

  double noise = 0.0;
  std::string noise_base = "equivalents";  // or "all"

  struct {
    double learning_rate = 0.1;
    int epochs = 15;
    int ngram_max = 3;
  } learner;

  struct {
    int rounds = 100;
    int max_depth = 3;
    double learning_rate = 0.1;
    double subsample = 0.8;
    bool one_hot = false;
  } tree;

  // gen-only knobs
  int gen_projects = 5;
  int gen_units = 3;
  int gen_functions = 4;

  void load_file(const std::filesystem::path& config_file);
  void validate() const;
};

int cmd_gen(const RunConfig& config);
int cmd_abstract(const RunConfig& config);
int cmd_label(const RunConfig& config);
int cmd_dataset(const RunConfig& config);
int cmd_train(const RunConfig& config);
int cmd_predict(const RunConfig& config);
int cmd_simulate(const RunConfig& config);
int cmd_report(const RunConfig& config);

}  // namespace mutlab::pipeline
