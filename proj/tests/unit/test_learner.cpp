#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "mutlab/error.hpp"
#include "mutlab/learner.hpp"
#include "mutlab/metrics.hpp"
#include "mutlab/rng.hpp"
#include "mutlab/synth.hpp"
#include "mutlab/textio.hpp"

using namespace mutlab;
namespace fs = std::filesystem;

namespace mutlab {

class LearnerTestPeer {
 public:
  static std::vector<std::vector<int>> rows(const SequenceClassifier& model,
                                            const std::vector<TrainingPair>& pairs) {
    std::vector<std::vector<int>> out;
    for (const auto& p : pairs) out.push_back(model.features_of(p.input));
    return out;
  }
  static std::size_t param_count(const SequenceClassifier& model) {
    return model.weights_.size();
  }
};

}  // namespace mutlab

namespace {

TrainingPair simple_pair(const std::string& id, std::vector<std::string> body, SeqLabel label) {
  AnnotatedSequence seq;
  seq.mutant_id = id;
  seq.tokens = std::move(body);
  seq.tokens.insert(seq.tokens.end(), {"MST[", "MathMutator", "]MSP[", "]"});
  return make_training_pair(seq, label);
}

double heldout_mcc(const SequenceClassifier& model, const std::vector<TrainingPair>& test) {
  std::vector<bool> truth, pred;
  for (const auto& p : test) {
    truth.push_back(p.label() == SeqLabel::S);
    pred.push_back(model.predict(p.input).label == SeqLabel::S);
  }
  return mcc(confusion(truth, pred));
}

}  // namespace

TEST_CASE("vocabulary keeps reserved slots and first-occurrence order") {
  std::vector<TrainingPair> pairs = {
      simple_pair("p1", {"a", "b", "a"}, SeqLabel::S),
      simple_pair("p2", {"b", "a"}, SeqLabel::N),
  };
  Vocabulary vocab = build_vocabulary(pairs);
  CHECK(vocab.lookup("a") == 2);
  CHECK(vocab.lookup("b") == 3);
  CHECK(vocab.lookup("nope") == Vocabulary::kUnknown);
  CHECK(vocab.tokens()[0] == "<pad>");
  CHECK(vocab.tokens()[1] == "<unk>");
  // annotation machinery and labels are tokens too
  CHECK(vocab.lookup("MST[") > 1);
  CHECK(vocab.lookup("S") > 1);
  CHECK(vocab.lookup("N") > 1);
}

TEST_CASE("abstracted corpus vocabulary stays bounded") {
  auto pairs = planted_sequences(200, 50, 17);
  Vocabulary vocab = build_vocabulary(pairs);
  // filler pool + annotation + operators + labels + reserved; far below 60
  CHECK(vocab.size() < 60);
}

TEST_CASE("training pair output differs from input only in the label slot") {
  auto pairs = planted_sequences(50, 50, 23);
  for (const auto& p : pairs) {
    REQUIRE(p.output.size() == p.input.size() + 1);
    auto [label, malformed] = parse_emission(p.input, p.output);
    CHECK_FALSE(malformed);
    CHECK(label == p.label());
  }
}

TEST_CASE("planted corpus trains to high held-out MCC") {
  auto pairs = planted_sequences(900, 50, 99);
  std::vector<TrainingPair> train(pairs.begin(), pairs.begin() + 600);
  std::vector<TrainingPair> valid(pairs.begin() + 600, pairs.begin() + 750);
  std::vector<TrainingPair> test(pairs.begin() + 750, pairs.end());

  TrainConfig config;
  config.seed = 1234;
  std::vector<EpochStats> stats;
  SequenceClassifier model = SequenceClassifier::train(train, config, &valid, &stats);

  CHECK(heldout_mcc(model, test) >= 0.9);

  REQUIRE(stats.size() == 15);  // default epoch count
  for (const auto& es : stats) {
    REQUIRE(es.valid_mcc.has_value());
  }
  CHECK(*stats.back().valid_mcc >= 0.9);
}

TEST_CASE("training loss decreases monotonically on a separable corpus") {
  auto pairs = planted_sequences(400, 50, 55);
  TrainConfig config;
  config.seed = 77;
  std::vector<EpochStats> stats;
  SequenceClassifier::train(pairs, config, nullptr, &stats);
  for (std::size_t i = 1; i < stats.size(); ++i)
    CHECK(stats[i].train_loss <= stats[i - 1].train_loss + 1e-12);
}

TEST_CASE("two-pair training memorizes both labels") {
  std::vector<TrainingPair> pairs = {
      simple_pair("pos", {"alpha", "beta"}, SeqLabel::S),
      simple_pair("neg", {"gamma", "delta"}, SeqLabel::N),
  };
  TrainConfig config;
  config.seed = 5;
  SequenceClassifier model = SequenceClassifier::train(pairs, config);
  CHECK(model.predict(pairs[0].input).label == SeqLabel::S);
  CHECK(model.predict(pairs[1].input).label == SeqLabel::N);
}

TEST_CASE("single-class training data is rejected") {
  std::vector<TrainingPair> pairs = {
      simple_pair("a", {"x"}, SeqLabel::S),
      simple_pair("b", {"y"}, SeqLabel::S),
  };
  TrainConfig config;
  config.seed = 1;
  CHECK_THROWS_AS(SequenceClassifier::train(pairs, config), Error);
}

TEST_CASE("same seed and data produce byte-identical model files") {
  auto pairs = planted_sequences(120, 25, 314);
  TrainConfig config;
  config.seed = 2718;

  fs::path dir = fs::temp_directory_path() / "mutlab_test_models";
  fs::create_directories(dir);
  SequenceClassifier::train(pairs, config).save(dir / "a.json");
  SequenceClassifier::train(pairs, config).save(dir / "b.json");
  CHECK(read_file(dir / "a.json") == read_file(dir / "b.json"));

  SUBCASE("model files reload to the same predictions") {
    SequenceClassifier loaded = SequenceClassifier::load(dir / "a.json");
    SequenceClassifier fresh = SequenceClassifier::train(pairs, config);
    for (const auto& p : pairs) {
      CHECK(loaded.predict(p.input).label == fresh.predict(p.input).label);
      CHECK(loaded.score(p.input) == doctest::Approx(fresh.score(p.input)).epsilon(1e-12));
    }
  }
}

TEST_CASE("well-formed emissions read the label from the slot") {
  std::vector<std::string> input = {"return", "null", ";", "MST[", "ReturnValsMutator",
                                    "]MSP[", "]"};
  auto emitted = append_label_emitter(input, SeqLabel::S);
  CHECK(join(emitted, " ") == "return null ; MST[ ReturnValsMutator ]MSP[ S ]");
  auto [label, malformed] = parse_emission(input, emitted);
  CHECK(label == SeqLabel::S);
  CHECK_FALSE(malformed);
}

TEST_CASE("any emission deviation outside the slot falls back to N") {
  std::vector<std::string> input = {"return", "null", ";", "MST[", "ReturnValsMutator",
                                    "]MSP[", "]"};

  SUBCASE("altered code token") {
    auto emitted = append_label_emitter(input, SeqLabel::S);
    emitted[1] = "0";
    auto [label, malformed] = parse_emission(input, emitted);
    CHECK(label == SeqLabel::N);
    CHECK(malformed);
  }
  SUBCASE("garbage in the slot") {
    auto emitted = append_label_emitter(input, SeqLabel::S);
    emitted[6] = "Q";
    auto [label, malformed] = parse_emission(input, emitted);
    CHECK(label == SeqLabel::N);
    CHECK(malformed);
  }
  SUBCASE("missing label entirely") {
    auto [label, malformed] = parse_emission(input, input);
    CHECK(label == SeqLabel::N);
    CHECK(malformed);
  }
  SUBCASE("dropped trailing token") {
    auto emitted = append_label_emitter(input, SeqLabel::N);
    emitted.pop_back();
    auto [label, malformed] = parse_emission(input, emitted);
    CHECK(label == SeqLabel::N);
    CHECK(malformed);
  }
}

TEST_CASE("corrupting emitter always yields N with the malformed flag") {
  auto pairs = planted_sequences(100, 25, 404);
  TrainConfig config;
  config.seed = 11;
  SequenceClassifier model = SequenceClassifier::train(pairs, config);

  Emitter corrupting = [](const std::vector<std::string>& input, SeqLabel label) {
    auto out = append_label_emitter(input, label);
    out[0] = out[0] + "_x";  // damage a code token
    return out;
  };
  for (const auto& p : pairs) {
    Prediction pr = model.predict_with_emitter(p.input, corrupting);
    CHECK(pr.label == SeqLabel::N);
    CHECK(pr.malformed);
  }
}

TEST_CASE("label-slot locality holds for the production emitter") {
  auto pairs = planted_sequences(150, 50, 505);
  TrainConfig config;
  config.seed = 12;
  SequenceClassifier model = SequenceClassifier::train(pairs, config);
  for (const auto& p : pairs) {
    Prediction pr = model.predict(p.input);
    CHECK_FALSE(pr.malformed);
    auto [label, malformed] = parse_emission(p.input, pr.emitted);
    CHECK_FALSE(malformed);
    CHECK(label == pr.label);
  }
}

TEST_CASE("score is the S-confidence and matches the decision") {
  auto pairs = planted_sequences(300, 50, 606);
  TrainConfig config;
  config.seed = 13;
  SequenceClassifier model = SequenceClassifier::train(pairs, config);
  for (const auto& p : pairs) {
    Prediction pr = model.predict(p.input);
    CHECK((pr.score > 0.5) == (pr.label == SeqLabel::S));
  }
  // planted positive scores high
  TrainingPair positive = simple_pair("probe", {"trigger_tok", ";"}, SeqLabel::S);
  CHECK(model.score(positive.input) > 0.5);
}

TEST_CASE("untrained model scores one half") {
  SequenceClassifier model;  // zero weights
  CHECK(model.score({"MST[", "MathMutator", "]MSP[", "]"}) == 0.5);
}

TEST_CASE("analytic gradients match central finite differences") {
  auto pairs = planted_sequences(12, 25, 808);
  TrainConfig config;
  config.seed = 21;
  SequenceClassifier model = SequenceClassifier::train(pairs, config);

  auto rows = LearnerTestPeer::rows(model, pairs);
  std::vector<int> labels;
  for (const auto& p : pairs) labels.push_back(p.label() == SeqLabel::S ? 1 : 0);
  const std::size_t dim = LearnerTestPeer::param_count(model);

  Rng rng(909);
  int worst_failures = 0;
  for (int point = 0; point < 50; ++point) {
    std::vector<double> params(dim);
    for (auto& w : params) w = rng.unit() * 2.0 - 1.0;
    std::vector<double> grad(dim);
    SequenceClassifier::loss_and_gradient(params, rows, labels, grad);

    const double h = 1e-4;
    std::vector<double> dummy(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      std::vector<double> plus = params, minus = params;
      plus[d] += h;
      minus[d] -= h;
      double lp = SequenceClassifier::loss_and_gradient(plus, rows, labels, dummy);
      double lm = SequenceClassifier::loss_and_gradient(minus, rows, labels, dummy);
      double numeric = (lp - lm) / (2 * h);
      double scale = std::max({1.0, std::abs(grad[d]), std::abs(numeric)});
      if (std::abs(grad[d] - numeric) / scale > 1e-5) ++worst_failures;
    }
  }
  CHECK(worst_failures == 0);
}
