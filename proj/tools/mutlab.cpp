#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mutlab/error.hpp"
#include "pipeline.hpp"

namespace {

using mutlab::pipeline::RunConfig;

struct Cli {
  RunConfig config;
  std::string config_file;
  std::string strategy;  // narrows config.strategies when set
};

void add_common_options(CLI::App* cmd, Cli& cli, bool* seed_seen) {
  cmd->add_option("--config", cli.config_file, "JSON config file; flags override its values");
  cmd->add_option("--corpus", cli.config.corpus_dir, "corpus directory");
  cmd->add_option("--out", cli.config.out_dir, "output directory");
  cmd->add_option("--seed", cli.config.seed, "master seed (mandatory)")
      ->each([seed_seen](const std::string&) { *seed_seen = true; });
  cmd->add_option("--budget", cli.config.budget, "sequence token budget (25, 50 or 100)");
  cmd->add_flag(
      "--no-abstraction",
      [&cli](std::int64_t count) {
        if (count > 0) cli.config.abstraction = false;
      },
      "skip identifier abstraction; comments are still removed");
  cmd->add_option("--allowlist", cli.config.allowlist_file,
                  "file of standard names kept verbatim");
  cmd->add_option("--folds", cli.config.folds, "cross-validation fold count");
  cmd->add_option("--strategy", cli.strategy, "restrict to one strategy")
      ->check(CLI::IsMember({"learner", "tree", "random"}));
  cmd->add_option("--target-ms", cli.config.target_ms, "target subsuming mutation score");
  cmd->add_option("--reps", cli.config.repetitions, "simulation repetitions");
  cmd->add_option("--select-size", cli.config.select_size,
                  "selection size for baselines (default: learner's predicted-S count)");
  cmd->add_option("--noise", cli.config.noise, "evaluation noise rate in [0,1]");
  cmd->add_option("--noise-base", cli.config.noise_base,
                  "noise flip base: fraction of 'equivalents' or of 'all' mutants")
      ->check(CLI::IsMember({"equivalents", "all"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mutation-testing laboratory: subsuming-mutant ground truth, "
               "selection strategies and test-effort simulation"};
  app.require_subcommand(1);

  Cli cli;
  bool seed_seen = false;

  struct Command {
    const char* name;
    const char* help;
    int (*run)(const RunConfig&);
  };
  const Command commands[] = {
      {"gen", "generate a synthetic corpus with planted structure", mutlab::pipeline::cmd_gen},
      {"abstract", "tokenize, abstract and window annotated sequences",
       mutlab::pipeline::cmd_abstract},
      {"label", "compute subsuming-mutant ground truth from the kill matrix",
       mutlab::pipeline::cmd_label},
      {"dataset", "split sequences into per-fold train/valid/test files",
       mutlab::pipeline::cmd_dataset},
      {"train", "train per-fold models for the selected strategies",
       mutlab::pipeline::cmd_train},
      {"predict", "emit per-mutant predictions for the selected strategies",
       mutlab::pipeline::cmd_predict},
      {"simulate", "run the mutation-guided testing simulation", mutlab::pipeline::cmd_simulate},
      {"report", "aggregate prediction metrics and effect sizes", mutlab::pipeline::cmd_report},
  };

  // first pass: find --config on the chosen subcommand so flags can override it
  std::map<std::string, const Command*> by_name;
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    add_common_options(sub, cli, &seed_seen);
    if (std::string(c.name) == "gen") {
      sub->add_option("--projects", cli.config.gen_projects, "projects to generate");
      sub->add_option("--units-per-project", cli.config.gen_units, "units per project");
      sub->add_option("--functions-per-unit", cli.config.gen_functions, "functions per unit");
    }
    by_name[c.name] = &c;
  }

  CLI11_PARSE(app, argc, argv);

  try {
    CLI::App* sub = app.get_subcommands().front();

    // layering: defaults, then the config file, then explicit flags
    RunConfig file_config;
    if (!cli.config_file.empty()) {
      file_config.load_file(cli.config_file);
      RunConfig merged = file_config;
      auto keep_flag = [&](const std::string& flag) { return sub->count(flag) > 0; };
      if (keep_flag("--corpus")) merged.corpus_dir = cli.config.corpus_dir;
      if (keep_flag("--out")) merged.out_dir = cli.config.out_dir;
      if (seed_seen) {
        merged.seed = cli.config.seed;
        merged.seed_set = true;
      }
      if (keep_flag("--budget")) merged.budget = cli.config.budget;
      if (keep_flag("--no-abstraction")) merged.abstraction = false;
      if (keep_flag("--allowlist")) merged.allowlist_file = cli.config.allowlist_file;
      if (keep_flag("--folds")) merged.folds = cli.config.folds;
      if (keep_flag("--target-ms")) merged.target_ms = cli.config.target_ms;
      if (keep_flag("--reps")) merged.repetitions = cli.config.repetitions;
      if (keep_flag("--select-size")) merged.select_size = cli.config.select_size;
      if (keep_flag("--noise")) merged.noise = cli.config.noise;
      if (keep_flag("--noise-base")) merged.noise_base = cli.config.noise_base;
      if (sub->get_name() == "gen") {
        if (keep_flag("--projects")) merged.gen_projects = cli.config.gen_projects;
        if (keep_flag("--units-per-project")) merged.gen_units = cli.config.gen_units;
        if (keep_flag("--functions-per-unit")) merged.gen_functions = cli.config.gen_functions;
      }
      cli.config = merged;
    } else {
      cli.config.seed_set = seed_seen;
    }
    if (!cli.strategy.empty()) cli.config.strategies = {cli.strategy};

    return by_name.at(sub->get_name())->run(cli.config);
  } catch (const mutlab::Error& e) {
    nlohmann::ordered_json record{{"error", {{"code", e.code()}, {"message", e.what()}}}};
    std::cerr << record.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    nlohmann::ordered_json record{{"error", {{"code", "internal_error"}, {"message", e.what()}}}};
    std::cerr << record.dump() << "\n";
    return 2;
  }
}
