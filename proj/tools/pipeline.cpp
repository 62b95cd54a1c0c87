#include "pipeline.hpp"

#include <algorithm>
#include <iostream>
#include <map>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "mutlab/abstraction.hpp"
#include "mutlab/baselines.hpp"
#include "mutlab/corpus.hpp"
#include "mutlab/error.hpp"
#include "mutlab/learner.hpp"
#include "mutlab/metrics.hpp"
#include "mutlab/rng.hpp"
#include "mutlab/simulation.hpp"
#include "mutlab/subsumption.hpp"
#include "mutlab/synth.hpp"
#include "mutlab/textio.hpp"

namespace mutlab::pipeline {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

// seed streams; every command derives from the one master seed
constexpr std::uint64_t kStreamFolds = 1;
constexpr std::uint64_t kStreamLearner = 100;  // + fold
constexpr std::uint64_t kStreamTree = 200;     // + fold
constexpr std::uint64_t kStreamSim = 300;      // + strategy slot
constexpr std::uint64_t kStreamNoise = 400;

int strategy_slot(const std::string& name) {
  if (name == "learner") return 0;
  if (name == "tree") return 1;
  if (name == "random") return 2;
  throw Error("invalid_config", "unknown strategy '" + name + "'");
}

void require_exists(const fs::path& p, const std::string& what) {
  if (!fs::exists(p))
    throw Error("missing_upstream", what + " not found: " + p.string() +
                                        " (run the producing command first)");
}

struct SequenceFile {
  bool has_output = false;
  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<std::string>> inputs;
  std::unordered_map<std::string, std::vector<std::string>> outputs;
};

SequenceFile read_sequences(const fs::path& file) {
  require_exists(file, "sequence file");
  SequenceFile seq;
  std::vector<std::string> lines = read_lines(file);
  if (lines.empty()) throw Error("malformed_line", file.string() + ":1: empty sequence file");
  std::vector<std::string> header = split(lines[0], '\t');
  if (header.size() < 2 || header[0] != "mutant_id" || header[1] != "input_line")
    throw Error("malformed_line", file.string() + ":1: bad sequence header");
  seq.has_output = header.size() == 3;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    std::vector<std::string> cells = split(lines[li], '\t');
    if (cells.size() != header.size())
      throw Error("malformed_line",
                  file.string() + ":" + std::to_string(li + 1) + ": wrong column count");
    seq.order.push_back(cells[0]);
    seq.inputs[cells[0]] = split(cells[1], ' ');
    if (seq.has_output) seq.outputs[cells[0]] = split(cells[2], ' ');
  }
  return seq;
}

struct PredictionRow {
  SeqLabel label = SeqLabel::N;
  double score = 0;
  bool malformed = false;
};

std::map<std::string, PredictionRow> read_predictions(const fs::path& file) {
  require_exists(file, "predictions file");
  std::vector<std::string> lines = read_lines(file);
  if (lines.empty() || lines[0] != "mutant_id,label,score,malformed")
    throw Error("malformed_line", file.string() + ":1: bad predictions header");
  std::map<std::string, PredictionRow> rows;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    std::string context = file.string() + ":" + std::to_string(li + 1);
    std::vector<std::string> cells = split(lines[li], ',');
    if (cells.size() != 4) throw Error("malformed_line", context + ": wrong column count");
    PredictionRow row;
    row.label = cells[1] == "S" ? SeqLabel::S : SeqLabel::N;
    row.score = parse_double(cells[2], context);
    row.malformed = cells[3] == "1";
    rows[cells[0]] = row;
  }
  return rows;
}

std::vector<std::string> active_strategies(const RunConfig& config,
                                           const std::set<std::string>& supported) {
  std::vector<std::string> out;
  for (const char* name : {"learner", "tree", "random"}) {
    bool wanted = std::find(config.strategies.begin(), config.strategies.end(), name) !=
                  config.strategies.end();
    if (wanted && supported.count(name)) out.push_back(name);
  }
  if (out.empty()) throw Error("invalid_config", "no applicable strategy selected");
  return out;
}

Corpus load_labeled_corpus(const RunConfig& config) {
  Corpus corpus = load_corpus(config.corpus_dir);
  if (corpus.labeled_count() != corpus.mutants.size())
    throw Error("missing_labels",
                "corpus has no complete label file; run the label command first");
  return corpus;
}

AbstractionOptions abstraction_options(const RunConfig& config) {
  AbstractionOptions options;
  options.enabled = config.abstraction;
  if (!config.allowlist_file.empty()) options.allowlist = load_allowlist(config.allowlist_file);
  return options;
}

// fold -> ordered mutant indices, following corpus order
std::vector<std::vector<std::size_t>> mutants_by_fold(const Corpus& corpus,
                                                      const FoldSplit& folds) {
  std::vector<std::vector<std::size_t>> by_fold(static_cast<std::size_t>(folds.fold_count));
  for (std::size_t mi = 0; mi < corpus.mutants.size(); ++mi) {
    auto it = folds.assignments.find(corpus.mutants[mi].project_id);
    if (it == folds.assignments.end())
      throw Error("id_mismatch", "project '" + corpus.mutants[mi].project_id +
                                     "' missing from the fold split");
    by_fold[static_cast<std::size_t>(it->second)].push_back(mi);
  }
  return by_fold;
}

}  // namespace

void RunConfig::load_file(const fs::path& config_file) {
  ordered_json j = ordered_json::parse(read_file(config_file), nullptr, false);
  if (j.is_discarded())
    throw Error("invalid_config", config_file.string() + ": invalid JSON");

  if (j.contains("corpus")) corpus_dir = j["corpus"].get<std::string>();
  if (j.contains("out")) out_dir = j["out"].get<std::string>();
  if (j.contains("seed")) {
    seed = j["seed"].get<std::uint64_t>();
    seed_set = true;
  }
  if (j.contains("budget")) budget = j["budget"].get<int>();
  if (j.contains("abstraction")) abstraction = j["abstraction"].get<bool>();
  if (j.contains("allowlist")) allowlist_file = j["allowlist"].get<std::string>();
  if (j.contains("folds")) folds = j["folds"].get<int>();
  if (j.contains("strategies")) strategies = j["strategies"].get<std::vector<std::string>>();
  if (j.contains("target_ms")) target_ms = j["target_ms"].get<double>();
  if (j.contains("repetitions")) repetitions = j["repetitions"].get<int>();
  if (j.contains("select_size")) select_size = j["select_size"].get<std::size_t>();
  if (j.contains("noise")) noise = j["noise"].get<double>();
  if (j.contains("noise_base")) noise_base = j["noise_base"].get<std::string>();
  if (j.contains("learner")) {
    const auto& l = j["learner"];
    if (l.contains("learning_rate")) learner.learning_rate = l["learning_rate"].get<double>();
    if (l.contains("epochs")) learner.epochs = l["epochs"].get<int>();
    if (l.contains("ngram_max")) learner.ngram_max = l["ngram_max"].get<int>();
  }
  if (j.contains("tree")) {
    const auto& t = j["tree"];
    if (t.contains("rounds")) tree.rounds = t["rounds"].get<int>();
    if (t.contains("max_depth")) tree.max_depth = t["max_depth"].get<int>();
    if (t.contains("learning_rate")) tree.learning_rate = t["learning_rate"].get<double>();
    if (t.contains("subsample")) tree.subsample = t["subsample"].get<double>();
    if (t.contains("one_hot")) tree.one_hot = t["one_hot"].get<bool>();
  }
  if (j.contains("gen")) {
    const auto& g = j["gen"];
    if (g.contains("projects")) gen_projects = g["projects"].get<int>();
    if (g.contains("units_per_project")) gen_units = g["units_per_project"].get<int>();
    if (g.contains("functions_per_unit")) gen_functions = g["functions_per_unit"].get<int>();
  }
}

void RunConfig::validate() const {
  if (!seed_set) throw Error("invalid_config", "seed is required (set --seed or config seed)");
  if (budget != 25 && budget != 50 && budget != 100)
    throw Error("invalid_config", "budget must be one of 25, 50, 100");
  if (noise < 0 || noise > 1)
    throw Error("invalid_config", "noise must lie in [0, 1]");
  if (noise_base != "equivalents" && noise_base != "all")
    throw Error("invalid_config", "noise_base must be 'equivalents' or 'all'");
  if (target_ms <= 0 || target_ms > 1)
    throw Error("invalid_config", "target_ms must lie in (0, 1]");
  if (repetitions < 1) throw Error("invalid_config", "repetitions must be at least 1");
  for (const auto& s : strategies) strategy_slot(s);
  if (corpus_dir.empty()) throw Error("invalid_config", "corpus directory is required");
  if (out_dir.empty()) throw Error("invalid_config", "output directory is required");
}

int cmd_gen(const RunConfig& config) {
  if (!config.seed_set) throw Error("invalid_config", "seed is required");
  if (config.corpus_dir.empty()) throw Error("invalid_config", "corpus directory is required");
  ToyCorpusConfig toy;
  toy.projects = config.gen_projects;
  toy.units_per_project = config.gen_units;
  toy.functions_per_unit = config.gen_functions;
  toy.seed = config.seed;
  write_toy_corpus(config.corpus_dir, toy);
  Corpus corpus = load_corpus(config.corpus_dir);
  std::cout << "generated corpus: " << corpus.project_ids.size() << " projects, "
            << corpus.mutants.size() << " mutants, " << corpus.kills.test_count() << " tests\n";
  return 0;
}

int cmd_abstract(const RunConfig& config) {
  config.validate();
  Corpus corpus = load_corpus(config.corpus_dir);
  AbstractionOptions options = abstraction_options(config);

  // abstract each unit once, reuse across its mutants
  std::unordered_map<std::string, std::vector<Token>> abstracted;
  for (const auto& unit : corpus.units) {
    auto [tokens, map] = abstract_unit(tokenize(unit.text), options);
    abstracted.emplace(unit.path, std::move(tokens));
  }

  bool emit_output = corpus.labeled_count() == corpus.mutants.size();
  std::string text = emit_output ? "mutant_id\tinput_line\toutput_line\n"
                                 : "mutant_id\tinput_line\n";
  for (const auto& m : corpus.mutants) {
    AnnotatedSequence seq = insert_annotation(abstracted.at(m.unit_path), m);
    AnnotatedSequence windowed = window_sequence(seq, config.budget);
    if (emit_output) {
      auto [input, output] = render_pair(windowed, *m.label);
      text += m.mutant_id + "\t" + input + "\t" + output + "\n";
    } else {
      text += m.mutant_id + "\t" + render_input(windowed) + "\n";
    }
  }
  write_file(config.out_dir / "sequences.tsv", text);
  std::cout << "abstract: wrote " << corpus.mutants.size() << " sequences (budget "
            << config.budget << (config.abstraction ? "" : ", unabstracted") << ")\n";
  return 0;
}

int cmd_label(const RunConfig& config) {
  config.validate();
  Corpus corpus = load_corpus(config.corpus_dir);
  LabelingResult result = subsuming_mutants(corpus.kills);
  save_labels(to_sn_labels(result.labels, corpus.kills), config.corpus_dir / "labels.csv");
  write_graph_json(result, corpus.kills, config.out_dir / "graph.json");
  std::cout << "label: " << result.labels.count(MutantFate::Subsuming) << " subsuming, "
            << result.labels.count(MutantFate::Subsumed) << " subsumed, "
            << result.labels.count(MutantFate::Equivalent) << " equivalent\n";
  return 0;
}

int cmd_dataset(const RunConfig& config) {
  config.validate();
  Corpus corpus = load_labeled_corpus(config);
  SequenceFile sequences = read_sequences(config.out_dir / "sequences.tsv");

  FoldSplit folds = make_folds(corpus, config.folds, derive_seed(config.seed, kStreamFolds));
  save_folds(folds, config.out_dir / "folds.json");
  auto by_fold = mutants_by_fold(corpus, folds);

  auto output_line = [&](const MutantRecord& m) {
    auto it = sequences.outputs.find(m.mutant_id);
    if (it != sequences.outputs.end()) return join(it->second, " ");
    return join(append_label_emitter(sequences.inputs.at(m.mutant_id), *m.label), " ");
  };

  for (int f = 0; f < config.folds; ++f) {
    std::vector<int> train_side;
    for (int other = 0; other < config.folds; ++other)
      if (other != f) train_side.push_back(other);
    auto [train_folds, valid_fold] = split_train_valid(train_side);

    std::string train_text = "mutant_id\tinput_line\toutput_line\n";
    std::string valid_text = train_text;
    std::string test_text = "mutant_id\tinput_line\n";
    for (int tf : train_folds)
      for (std::size_t mi : by_fold[static_cast<std::size_t>(tf)]) {
        const auto& m = corpus.mutants[mi];
        train_text += m.mutant_id + "\t" + join(sequences.inputs.at(m.mutant_id), " ") + "\t" +
                      output_line(m) + "\n";
      }
    for (std::size_t mi : by_fold[static_cast<std::size_t>(valid_fold)]) {
      const auto& m = corpus.mutants[mi];
      valid_text += m.mutant_id + "\t" + join(sequences.inputs.at(m.mutant_id), " ") + "\t" +
                    output_line(m) + "\n";
    }
    for (std::size_t mi : by_fold[static_cast<std::size_t>(f)]) {
      const auto& m = corpus.mutants[mi];
      test_text += m.mutant_id + "\t" + join(sequences.inputs.at(m.mutant_id), " ") + "\n";
    }
    fs::path dir = config.out_dir / ("fold_" + std::to_string(f));
    write_file(dir / "train.tsv", train_text);
    write_file(dir / "valid.tsv", valid_text);
    write_file(dir / "test.tsv", test_text);
  }
  std::cout << "dataset: " << config.folds << " folds written\n";
  return 0;
}

namespace {

std::vector<TrainingPair> pairs_from_tsv(const fs::path& file) {
  SequenceFile seq = read_sequences(file);
  if (!seq.has_output)
    throw Error("malformed_line", file.string() + ": training file lacks output lines");
  std::vector<TrainingPair> pairs;
  for (const auto& id : seq.order) {
    TrainingPair p;
    p.mutant_id = id;
    p.input = seq.inputs.at(id);
    p.output = seq.outputs.at(id);
    pairs.push_back(std::move(p));
  }
  return pairs;
}

}  // namespace

int cmd_train(const RunConfig& config) {
  config.validate();
  auto strategies = active_strategies(config, {"learner", "tree"});

  for (const auto& strategy : strategies) {
    if (strategy == "learner") {
      for (int f = 0; f < config.folds; ++f) {
        fs::path fold_dir = config.out_dir / ("fold_" + std::to_string(f));
        require_exists(fold_dir / "train.tsv", "dataset fold");
        auto train_pairs = pairs_from_tsv(fold_dir / "train.tsv");
        auto valid_pairs = pairs_from_tsv(fold_dir / "valid.tsv");

        TrainConfig tc;
        tc.learning_rate = config.learner.learning_rate;
        tc.epochs = config.learner.epochs;
        tc.ngram_max = config.learner.ngram_max;
        tc.seed = derive_seed(config.seed, kStreamLearner + static_cast<std::uint64_t>(f));

        std::vector<EpochStats> stats;
        SequenceClassifier model =
            SequenceClassifier::train(train_pairs, tc, &valid_pairs, &stats);
        fs::path model_file =
            config.out_dir / "models" / ("learner_fold" + std::to_string(f) + ".json");
        model.save(model_file);
        for (const auto& es : stats)
          if (es.valid_mcc)
            std::cout << "train learner fold " << f << " epoch " << es.epoch
                      << " valid_mcc=" << format_double(*es.valid_mcc) << "\n";
      }
    } else {  // tree
      Corpus corpus = load_labeled_corpus(config);
      if (!corpus.features)
        throw Error("missing_upstream", "tree training needs a features file in the corpus");
      require_exists(config.out_dir / "folds.json", "fold split");
      FoldSplit folds = load_folds(config.out_dir / "folds.json");
      auto by_fold = mutants_by_fold(corpus, folds);

      for (int f = 0; f < config.folds; ++f) {
        FeatureTable table;
        table.schema = corpus.features->schema;
        std::vector<int> labels;
        for (int other = 0; other < config.folds; ++other) {
          if (other == f) continue;
          for (std::size_t mi : by_fold[static_cast<std::size_t>(other)]) {
            const auto& m = corpus.mutants[mi];
            auto row = corpus.features->index_of(m.mutant_id);
            table.mutant_ids.push_back(m.mutant_id);
            table.values.push_back(corpus.features->values[*row]);
            labels.push_back(*m.label == SeqLabel::S ? 1 : 0);
          }
        }
        EnsembleConfig ec;
        ec.rounds = config.tree.rounds;
        ec.max_depth = config.tree.max_depth;
        ec.learning_rate = config.tree.learning_rate;
        ec.subsample = config.tree.subsample;
        ec.one_hot = config.tree.one_hot;
        ec.seed = derive_seed(config.seed, kStreamTree + static_cast<std::uint64_t>(f));
        TreeEnsemble model = TreeEnsemble::train(table, labels, ec);
        model.save(config.out_dir / "models" / ("tree_fold" + std::to_string(f) + ".json"));
        std::cout << "train tree fold " << f << ": " << model.tree_count() << " rounds\n";
      }
    }
  }
  return 0;
}

int cmd_predict(const RunConfig& config) {
  config.validate();
  auto strategies = active_strategies(config, {"learner", "tree"});
  Corpus corpus = load_corpus(config.corpus_dir);
  require_exists(config.out_dir / "folds.json", "fold split");
  FoldSplit folds = load_folds(config.out_dir / "folds.json");

  for (const auto& strategy : strategies) {
    std::string text = "mutant_id,label,score,malformed\n";
    std::size_t malformed_count = 0;

    if (strategy == "learner") {
      SequenceFile sequences = read_sequences(config.out_dir / "sequences.tsv");
      std::map<int, SequenceClassifier> models;
      for (int f = 0; f < config.folds; ++f) {
        fs::path file = config.out_dir / "models" / ("learner_fold" + std::to_string(f) + ".json");
        if (!fs::exists(file))
          throw Error("model_not_found", "model not found: " + file.string());
        models.emplace(f, SequenceClassifier::load(file));
      }
      for (const auto& m : corpus.mutants) {
        int fold = folds.assignments.at(m.project_id);
        Prediction p = models.at(fold).predict(sequences.inputs.at(m.mutant_id));
        if (p.malformed) ++malformed_count;
        text += m.mutant_id;
        text += ',';
        text += label_char(p.label);
        text += ',' + format_double(p.score) + ',' + (p.malformed ? "1" : "0") + "\n";
      }
    } else {  // tree
      if (!corpus.features)
        throw Error("missing_upstream", "tree prediction needs a features file in the corpus");
      std::map<int, TreeEnsemble> models;
      for (int f = 0; f < config.folds; ++f) {
        fs::path file = config.out_dir / "models" / ("tree_fold" + std::to_string(f) + ".json");
        if (!fs::exists(file))
          throw Error("model_not_found", "model not found: " + file.string());
        models.emplace(f, TreeEnsemble::load(file));
      }
      for (const auto& m : corpus.mutants) {
        int fold = folds.assignments.at(m.project_id);
        auto row = corpus.features->index_of(m.mutant_id);
        double p =
            models.at(fold).predict_proba(corpus.features->schema, corpus.features->values[*row]);
        text += m.mutant_id + "," + (p > 0.5 ? "S" : "N") + "," + format_double(p) + ",0\n";
      }
    }
    write_file(config.out_dir / strategy / "predictions.csv", text);
    if (strategy == "learner")
      std::cout << "predict learner: malformed rate "
                << format_double(static_cast<double>(malformed_count) /
                                 static_cast<double>(corpus.mutants.size()))
                << "\n";
    else
      std::cout << "predict tree: " << corpus.mutants.size() << " rows\n";
  }
  return 0;
}

int cmd_simulate(const RunConfig& config) {
  config.validate();
  auto strategies = active_strategies(config, {"learner", "tree", "random"});
  Corpus corpus = load_corpus(config.corpus_dir);
  GroundTruth truth = subsuming_mutants(corpus.kills).labels;
  if (config.noise > 0) {
    NoiseConfig noise{config.noise, derive_seed(config.seed, kStreamNoise),
                      config.noise_base == "all"};
    truth = inject_noise(truth, noise);
  }

  auto index_of = [&](const std::string& id) {
    auto idx = corpus.kills.mutant_index(id);
    if (!idx) throw Error("unmatched_mutant_id", "prediction for unknown mutant '" + id + "'");
    return *idx;
  };

  // selection size: the learner's predicted-subsuming count unless overridden
  std::size_t select_size = config.select_size;
  std::vector<std::size_t> learner_selected;
  fs::path learner_file = config.out_dir / "learner" / "predictions.csv";
  if (fs::exists(learner_file)) {
    for (const auto& [id, row] : read_predictions(learner_file))
      if (row.label == SeqLabel::S) learner_selected.push_back(index_of(id));
    std::sort(learner_selected.begin(), learner_selected.end());
  }
  if (select_size == 0) {
    if (!fs::exists(learner_file))
      throw Error("missing_upstream",
                  "select size unset and learner predictions missing: " + learner_file.string());
    select_size = learner_selected.size();
    if (select_size == 0)
      throw Error("empty_selection", "learner predicted no subsuming mutants; set --select-size");
  }

  std::string results_text =
      "strategy,rep,final_ms_star,analyzed,equivalents_analyzed,test_executions,reached_target\n";
  std::string trajectory_text = "strategy,rep,step,ms_star\n";

  for (const auto& strategy : strategies) {
    SimulationConfig sim;
    sim.target_ms_star = config.target_ms;
    sim.repetitions = config.repetitions;
    sim.master_seed = derive_seed(
        config.seed, kStreamSim + static_cast<std::uint64_t>(strategy_slot(strategy)));

    std::vector<std::size_t> selected;
    if (strategy == "learner") {
      if (!fs::exists(learner_file))
        throw Error("missing_upstream", "learner predictions missing: " + learner_file.string());
      selected = learner_selected;
      sim.order = OrderPolicy::ShufflePerRep;
    } else if (strategy == "tree") {
      auto rows = read_predictions(config.out_dir / "tree" / "predictions.csv");
      std::vector<std::pair<std::string, double>> ranked;
      for (const auto& [id, row] : rows) ranked.emplace_back(id, row.score);
      std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
      });
      for (std::size_t i = 0; i < std::min(select_size, ranked.size()); ++i)
        selected.push_back(index_of(ranked[i].first));
      sim.order = OrderPolicy::FixedRanking;
    } else {  // random: fresh uniform selection of the same size each repetition
      for (std::size_t i = 0; i < corpus.kills.mutant_count(); ++i) selected.push_back(i);
      sim.order = OrderPolicy::ShufflePerRep;
      sim.truncate_to = select_size;
    }

    SimulationResult result = repeat_simulations(selected, corpus.kills, truth, sim);
    for (std::size_t rep = 0; rep < result.repetitions.size(); ++rep) {
      const auto& r = result.repetitions[rep];
      results_text += strategy + "," + std::to_string(rep) + "," +
                      format_double(r.final_ms_star) + "," + std::to_string(r.analyzed) + "," +
                      std::to_string(r.equivalents) + "," + std::to_string(r.test_executions) +
                      "," + (r.reached_target ? "1" : "0") + "\n";
      for (std::size_t step = 0; step < r.trajectory.size(); ++step)
        trajectory_text += strategy + "," + std::to_string(rep) + "," +
                           std::to_string(step + 1) + "," + format_double(r.trajectory[step]) +
                           "\n";
    }
    std::cout << "simulate " << strategy << ": mean final MS* "
              << format_double(result.mean_final_ms_star()) << " over " << config.repetitions
              << " repetitions (selection size " << select_size << ")\n";
  }

  write_file(config.out_dir / "sim_results.csv", results_text);
  write_file(config.out_dir / "trajectory.csv", trajectory_text);
  return 0;
}

int cmd_report(const RunConfig& config) {
  config.validate();
  Corpus corpus = load_labeled_corpus(config);
  require_exists(config.out_dir / "folds.json", "fold split");
  FoldSplit folds = load_folds(config.out_dir / "folds.json");
  auto by_fold = mutants_by_fold(corpus, folds);

  std::string metrics_text = "strategy,fold,mcc,f,precision,recall\n";
  std::string summary_text = "strategy,metric,mean,median\n";

  auto wanted = active_strategies(config, {"learner", "tree"});
  std::vector<std::string> reported;
  for (const auto& strategy : wanted) {
    fs::path file = config.out_dir / strategy / "predictions.csv";
    if (!fs::exists(file)) continue;
    auto predictions = read_predictions(file);
    reported.push_back(strategy);

    std::vector<double> mccs, fs_, precisions, recalls;
    for (int f = 0; f < folds.fold_count; ++f) {
      std::vector<bool> truth, pred;
      for (std::size_t mi : by_fold[static_cast<std::size_t>(f)]) {
        const auto& m = corpus.mutants[mi];
        auto it = predictions.find(m.mutant_id);
        if (it == predictions.end())
          throw Error("unmatched_mutant_id",
                      file.string() + ": no prediction for '" + m.mutant_id + "'");
        truth.push_back(*m.label == SeqLabel::S);
        pred.push_back(it->second.label == SeqLabel::S);
      }
      ConfusionMatrix cm = confusion(truth, pred);
      double m1 = mcc(cm), f1 = f_measure(cm), p1 = precision(cm), r1 = recall(cm);
      metrics_text += strategy + "," + std::to_string(f) + "," + format_double(m1) + "," +
                      format_double(f1) + "," + format_double(p1) + "," + format_double(r1) +
                      "\n";
      mccs.push_back(m1);
      fs_.push_back(f1);
      precisions.push_back(p1);
      recalls.push_back(r1);
    }
    for (auto [name, values] :
         std::vector<std::pair<std::string, std::vector<double>*>>{
             {"mcc", &mccs}, {"f", &fs_}, {"precision", &precisions}, {"recall", &recalls}}) {
      MetricSummary s = aggregate(*values);
      summary_text += strategy + "," + name + "," + format_double(s.mean) + "," +
                      format_double(s.median) + "\n";
    }
  }
  if (reported.empty())
    throw Error("missing_upstream", "no predictions found under " + config.out_dir.string());

  write_file(config.out_dir / "metrics.csv", metrics_text);
  write_file(config.out_dir / "summary.csv", summary_text);

  // effect sizes between simulated strategies, when a simulation ran
  fs::path sim_file = config.out_dir / "sim_results.csv";
  if (fs::exists(sim_file)) {
    std::map<std::string, std::vector<double>> final_scores;
    std::vector<std::string> lines = read_lines(sim_file);
    for (std::size_t li = 1; li < lines.size(); ++li) {
      if (lines[li].empty()) continue;
      std::vector<std::string> cells = split(lines[li], ',');
      if (cells.size() < 3) continue;
      final_scores[cells[0]].push_back(parse_double(cells[2], sim_file.string()));
    }
    for (const auto& [a, xs] : final_scores)
      for (const auto& [b, ys] : final_scores)
        if (a < b)
          std::cout << "report: A12(" << a << " vs " << b
                    << ") on final MS* = " << format_double(vargha_delaney_a12(xs, ys)) << "\n";
  }
  std::cout << "report: wrote metrics for " << reported.size() << " strategies over "
            << folds.fold_count << " folds\n";
  return 0;
}

}  // namespace mutlab::pipeline
