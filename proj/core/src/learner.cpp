#include "mutlab/learner.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "mutlab/error.hpp"
#include "mutlab/metrics.hpp"
#include "mutlab/rng.hpp"
#include "mutlab/textio.hpp"

namespace mutlab {

namespace {

constexpr const char* kAnnMid = "]MSP[";
constexpr const char* kAnnEnd = "]";

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

// Index of "]MSP[" when the sequence carries an empty label slot.
std::optional<std::size_t> slot_position(const std::vector<std::string>& tokens) {
  for (std::size_t i = 0; i < tokens.size(); ++i)
    if (tokens[i] == kAnnMid) {
      if (i + 1 < tokens.size() && tokens[i + 1] == kAnnEnd) return i;
      return std::nullopt;
    }
  return std::nullopt;
}

}  // namespace

Vocabulary::Vocabulary() {
  add("<pad>");
  add("<unk>");
}

int Vocabulary::add(const std::string& token) {
  auto [it, inserted] = index_.emplace(token, static_cast<int>(tokens_.size()));
  if (inserted) tokens_.push_back(token);
  return it->second;
}

int Vocabulary::lookup(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnknown : it->second;
}

SeqLabel TrainingPair::label() const {
  for (std::size_t i = 0; i + 1 < output.size(); ++i)
    if (output[i] == kAnnMid) {
      if (output[i + 1] == "S") return SeqLabel::S;
      if (output[i + 1] == "N") return SeqLabel::N;
      break;
    }
  throw Error("invalid_sequence", mutant_id + ": output line carries no label");
}

TrainingPair make_training_pair(const AnnotatedSequence& seq, SeqLabel label) {
  auto rendered = render_pair(seq, label);
  TrainingPair pair;
  pair.mutant_id = seq.mutant_id;
  pair.input = seq.tokens;
  pair.output = split(rendered.second, ' ');
  return pair;
}

Vocabulary build_vocabulary(const std::vector<TrainingPair>& pairs) {
  if (pairs.empty()) throw Error("empty_training_set", "no sequences to index");
  Vocabulary vocab;
  for (const auto& p : pairs) {
    for (const auto& t : p.input) vocab.add(t);
    for (const auto& t : p.output) vocab.add(t);
  }
  return vocab;
}

std::vector<std::string> append_label_emitter(const std::vector<std::string>& input,
                                              SeqLabel label) {
  std::vector<std::string> out = input;
  auto slot = slot_position(input);
  if (!slot) return out;  // leaves the line unchanged; parse flags it
  out.insert(out.begin() + static_cast<std::ptrdiff_t>(*slot) + 1,
             std::string(1, label_char(label)));
  return out;
}

std::pair<SeqLabel, bool> parse_emission(const std::vector<std::string>& input,
                                         const std::vector<std::string>& emitted) {
  auto slot = slot_position(input);
  if (!slot) return {SeqLabel::N, true};
  std::size_t p = *slot;
  if (emitted.size() != input.size() + 1) return {SeqLabel::N, true};
  for (std::size_t i = 0; i <= p; ++i)
    if (emitted[i] != input[i]) return {SeqLabel::N, true};
  if (emitted[p + 1] != "S" && emitted[p + 1] != "N") return {SeqLabel::N, true};
  for (std::size_t i = p + 1; i < input.size(); ++i)
    if (emitted[i + 1] != input[i]) return {SeqLabel::N, true};
  return {emitted[p + 1] == "S" ? SeqLabel::S : SeqLabel::N, false};
}

std::vector<int> SequenceClassifier::features_of(const std::vector<std::string>& input) const {
  std::vector<int> ids;
  ids.reserve(input.size());
  for (const auto& t : input) ids.push_back(vocab_.lookup(t));

  std::vector<int> features;
  std::string key;
  for (int n = 1; n <= config_.ngram_max; ++n) {
    if (static_cast<std::size_t>(n) > ids.size()) break;
    for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= ids.size(); ++i) {
      key.clear();
      for (int j = 0; j < n; ++j) {
        if (j) key += ',';
        key += std::to_string(ids[i + static_cast<std::size_t>(j)]);
      }
      auto it = feature_index_.find(key);
      if (it != feature_index_.end()) features.push_back(it->second);
    }
  }
  std::sort(features.begin(), features.end());
  features.erase(std::unique(features.begin(), features.end()), features.end());
  return features;
}

double SequenceClassifier::loss_and_gradient(std::span<const double> params,
                                             const std::vector<std::vector<int>>& rows,
                                             const std::vector<int>& labels,
                                             std::span<double> grad) {
  const std::size_t n = rows.size();
  const std::size_t bias = params.size() - 1;
  std::fill(grad.begin(), grad.end(), 0.0);
  double loss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double z = params[bias];
    for (int f : rows[i]) z += params[static_cast<std::size_t>(f)];
    double y = labels[i];
    // log(1 + e^z) - y z, evaluated stably
    loss += std::max(z, 0.0) - y * z + std::log1p(std::exp(-std::abs(z)));
    double g = sigmoid(z) - y;
    for (int f : rows[i]) grad[static_cast<std::size_t>(f)] += g;
    grad[bias] += g;
  }
  for (auto& g : grad) g /= static_cast<double>(n);
  return loss / static_cast<double>(n);
}

SequenceClassifier SequenceClassifier::train(const std::vector<TrainingPair>& pairs,
                                             const TrainConfig& config,
                                             const std::vector<TrainingPair>* validation,
                                             std::vector<EpochStats>* stats) {
  if (pairs.empty()) throw Error("empty_training_set", "no training pairs");

  SequenceClassifier model;
  model.config_ = config;

  bool has_s = false, has_n = false;
  for (const auto& p : pairs) {
    auto [label, malformed] = parse_emission(p.input, p.output);
    if (malformed)
      throw Error("invalid_sequence",
                  p.mutant_id + ": output line must equal the input up to the label slot");
    (label == SeqLabel::S ? has_s : has_n) = true;
  }
  if (!has_s || !has_n)
    throw Error("single_class", "training data holds only one label; both S and N are required");

  model.vocab_ = build_vocabulary(pairs);

  // n-gram dictionary over training inputs, first-occurrence order
  std::string key;
  for (const auto& p : pairs) {
    std::vector<int> ids;
    for (const auto& t : p.input) ids.push_back(model.vocab_.lookup(t));
    for (int n = 1; n <= config.ngram_max; ++n) {
      if (static_cast<std::size_t>(n) > ids.size()) break;
      for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= ids.size(); ++i) {
        key.clear();
        for (int j = 0; j < n; ++j) {
          if (j) key += ',';
          key += std::to_string(ids[i + static_cast<std::size_t>(j)]);
        }
        auto [it, inserted] =
            model.feature_index_.emplace(key, static_cast<int>(model.feature_keys_.size()));
        if (inserted) model.feature_keys_.push_back(key);
      }
    }
  }

  std::vector<std::vector<int>> rows;
  std::vector<int> labels;
  rows.reserve(pairs.size());
  for (const auto& p : pairs) {
    rows.push_back(model.features_of(p.input));
    labels.push_back(p.label() == SeqLabel::S ? 1 : 0);
  }

  model.weights_.assign(model.feature_keys_.size() + 1, 0.0);
  const std::size_t bias = model.weights_.size() - 1;

  Rng rng(config.seed);
  std::vector<std::size_t> order(pairs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t idx : order) {
      double z = model.weights_[bias];
      for (int f : rows[idx]) z += model.weights_[static_cast<std::size_t>(f)];
      double g = sigmoid(z) - labels[idx];
      double step = config.learning_rate * g;
      for (int f : rows[idx]) model.weights_[static_cast<std::size_t>(f)] -= step;
      model.weights_[bias] -= step;
    }
    if (stats) {
      EpochStats es;
      es.epoch = epoch + 1;
      std::vector<double> dummy(model.weights_.size());
      es.train_loss = loss_and_gradient(model.weights_, rows, labels, dummy);
      if (validation && !validation->empty()) {
        std::vector<bool> truth, pred;
        for (const auto& v : *validation) {
          truth.push_back(v.label() == SeqLabel::S);
          pred.push_back(model.predict(v.input).label == SeqLabel::S);
        }
        es.valid_mcc = mcc(confusion(truth, pred));
      }
      stats->push_back(es);
    }
  }
  return model;
}

double SequenceClassifier::score(const std::vector<std::string>& input) const {
  if (weights_.empty()) return 0.5;
  double z = weights_.back();
  for (int f : features_of(input)) z += weights_[static_cast<std::size_t>(f)];
  return sigmoid(z);
}

Prediction SequenceClassifier::predict(const std::vector<std::string>& input) const {
  return predict_with_emitter(input, append_label_emitter);
}

Prediction SequenceClassifier::predict(const AnnotatedSequence& seq) const {
  return predict(seq.tokens);
}

Prediction SequenceClassifier::predict_with_emitter(const std::vector<std::string>& input,
                                                    const Emitter& emitter) const {
  Prediction out;
  out.score = score(input);
  SeqLabel proposed = out.score > 0.5 ? SeqLabel::S : SeqLabel::N;
  out.emitted = emitter(input, proposed);
  auto [label, malformed] = parse_emission(input, out.emitted);
  out.label = label;
  out.malformed = malformed;
  return out;
}

void SequenceClassifier::save(const std::filesystem::path& file) const {
  nlohmann::ordered_json j;
  j["backend"] = backend_;
  j["config"] = {{"learning_rate", config_.learning_rate},
                 {"epochs", config_.epochs},
                 {"ngram_max", config_.ngram_max},
                 {"seed", config_.seed}};
  j["vocabulary"] = vocab_.tokens();
  j["features"] = feature_keys_;
  j["weights"] = weights_;
  write_file(file, j.dump() + "\n");
}

SequenceClassifier SequenceClassifier::load(const std::filesystem::path& file) {
  nlohmann::ordered_json j = nlohmann::ordered_json::parse(read_file(file), nullptr, false);
  if (j.is_discarded()) throw Error("malformed_model", file.string() + ": invalid JSON");
  SequenceClassifier model;
  model.backend_ = j.at("backend").get<std::string>();
  if (model.backend_ != "ngram-logistic")
    throw Error("malformed_model", file.string() + ": unknown backend '" + model.backend_ + "'");
  model.config_.learning_rate = j.at("config").at("learning_rate").get<double>();
  model.config_.epochs = j.at("config").at("epochs").get<int>();
  model.config_.ngram_max = j.at("config").at("ngram_max").get<int>();
  model.config_.seed = j.at("config").at("seed").get<std::uint64_t>();
  for (const auto& t : j.at("vocabulary")) {
    std::string tok = t.get<std::string>();
    if (tok != "<pad>" && tok != "<unk>") model.vocab_.add(tok);
  }
  for (const auto& k : j.at("features")) {
    std::string keystr = k.get<std::string>();
    model.feature_index_.emplace(keystr, static_cast<int>(model.feature_keys_.size()));
    model.feature_keys_.push_back(keystr);
  }
  model.weights_ = j.at("weights").get<std::vector<double>>();
  if (model.weights_.size() != model.feature_keys_.size() + 1)
    throw Error("malformed_model", file.string() + ": weight count does not match features");
  return model;
}

}  // namespace mutlab
