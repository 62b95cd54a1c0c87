#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mutlab/abstraction.hpp"

namespace mutlab {

// Dense token index with reserved padding/unknown slots.
class Vocabulary {
 public:
  static constexpr int kPadding = 0;
  static constexpr int kUnknown = 1;

  Vocabulary();

  int add(const std::string& token);          // idempotent
  int lookup(const std::string& token) const; // kUnknown for unseen tokens
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

struct TrainingPair {
  std::string mutant_id;
  std::vector<std::string> input;   // label slot empty
  std::vector<std::string> output;  // input with the label filled in

  SeqLabel label() const;  // read from the output's label slot
};

TrainingPair make_training_pair(const AnnotatedSequence& seq, SeqLabel label);

// Indexes every token of the training pairs (inputs and outputs) in
// first-occurrence order after the reserved slots.
Vocabulary build_vocabulary(const std::vector<TrainingPair>& pairs);

struct TrainConfig {
  double learning_rate = 0.1;
  int epochs = 15;
  int ngram_max = 3;
  std::uint64_t seed = 0;  // mandatory; training is deterministic given it
};

struct EpochStats {
  int epoch = 0;
  double train_loss = 0;
  std::optional<double> valid_mcc;
};

struct Prediction {
  SeqLabel label = SeqLabel::N;
  double score = 0.5;  // P(label == S)
  bool malformed = false;
  std::vector<std::string> emitted;
};

// Produces the full output line for an input sequence; the production model
// appends the label, but tests may inject a corrupting emitter to exercise
// the fallback path.
using Emitter = std::function<std::vector<std::string>(const std::vector<std::string>& input,
                                                       SeqLabel label)>;

std::vector<std::string> append_label_emitter(const std::vector<std::string>& input, SeqLabel label);

// Reads the label out of an emitted line. Any deviation from the input other
// than filling the label slot with S or N yields N with the malformed flag.
std::pair<SeqLabel, bool> parse_emission(const std::vector<std::string>& input,
                                         const std::vector<std::string>& emitted);

// Sequence classifier behind the translator-style contract: consume an
// annotated token sequence, emit it back with a label in the annotation slot.
// Reference backend: bag of token n-grams (n = 1..3) into logistic regression
// trained with seeded SGD.
class SequenceClassifier {
 public:
  // Trains on windowed pairs; both labels must be present. When a validation
  // set is given, per-epoch validation MCC is recorded in the stats log.
  static SequenceClassifier train(const std::vector<TrainingPair>& pairs, const TrainConfig& config,
                                  const std::vector<TrainingPair>* validation = nullptr,
                                  std::vector<EpochStats>* stats = nullptr);

  double score(const std::vector<std::string>& input) const;

  Prediction predict(const AnnotatedSequence& seq) const;
  Prediction predict(const std::vector<std::string>& input) const;
  Prediction predict_with_emitter(const std::vector<std::string>& input,
                                  const Emitter& emitter) const;

  const Vocabulary& vocabulary() const { return vocab_; }
  const TrainConfig& config() const { return config_; }
  const std::string& backend() const { return backend_; }

  void save(const std::filesystem::path& file) const;
  static SequenceClassifier load(const std::filesystem::path& file);

  // Full-batch logistic loss and gradient at the given parameter point
  // (weights then bias); exposed for optimizer checks.
  static double loss_and_gradient(std::span<const double> params,
                                  const std::vector<std::vector<int>>& rows,
                                  const std::vector<int>& labels, std::span<double> grad);

 private:
  friend class LearnerTestPeer;

  std::vector<int> features_of(const std::vector<std::string>& input) const;

  std::string backend_ = "ngram-logistic";
  Vocabulary vocab_;
  // n-gram key (vocab ids packed base |vocab|) -> feature slot
  std::unordered_map<std::string, int> feature_index_;
  std::vector<std::string> feature_keys_;
  std::vector<double> weights_;  // |features| + 1, bias last
  TrainConfig config_;
};

}  // namespace mutlab
