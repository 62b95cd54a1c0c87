#include "mutlab/synth.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <set>

#include "mutlab/error.hpp"
#include "mutlab/rng.hpp"
#include "mutlab/subsumption.hpp"

namespace mutlab {

namespace {

const std::array<const char*, 6> kOperators = {
    "ReturnValsMutator",          "NegateConditionalsMutator", "ConditionalsBoundaryMutator",
    "MathMutator",                "IncrementsMutator",         "VoidMethodCallMutator"};

const std::array<const char*, 10> kVarNames = {"count", "total",  "index", "limit", "buffer",
                                               "flag",  "offset", "size",  "temp",  "cursor"};
const std::array<const char*, 8> kFnNames = {"update",  "refresh", "merge",  "scanInput",
                                             "clampTo", "resolve", "append", "drain"};
const std::array<const char*, 4> kTypeNames = {"Buffer", "Packet", "Record", "Handle"};

std::string pick(Rng& rng, const auto& pool) { return pool[rng.below(pool.size())]; }

// Emits one function; statements mix declarations, arithmetic, branches and
// null-handling so all abstraction categories occur.
std::string make_function(Rng& rng, int fn_index, bool with_labels, bool force_null_return) {
  std::string fn = std::string(kFnNames[static_cast<std::size_t>(fn_index) % kFnNames.size()]) +
                   std::to_string(fn_index);
  std::string type = pick(rng, kTypeNames);
  std::string a = pick(rng, kVarNames);
  std::string b = pick(rng, kVarNames);
  while (b == a) b = pick(rng, kVarNames);

  std::string out;
  bool returns_object = rng.below(2) == 0 || force_null_return;
  out += std::string(returns_object ? "String" : "int") + " " + fn + " ( " + type + " " + a +
         " , int " + b + " ) {\n";

  int body = 4 + static_cast<int>(rng.below(4));
  std::string local = pick(rng, kVarNames) + std::to_string(rng.below(9));
  out += "  int " + local + " = " + std::to_string(rng.below(100)) + " ;\n";
  for (int s = 0; s < body; ++s) {
    switch (rng.below(6)) {
      case 0:
        out += "  " + local + " = " + local + " + " + std::to_string(1 + rng.below(9)) + " ;\n";
        break;
      case 1:
        out += "  if ( " + local + " > " + b + " ) {\n    " + local + " = " + b + " ;\n  }\n";
        break;
      case 2:
        out += "  if ( " + a + " == null ) {\n    return null ;\n  }\n";
        break;
      case 3:
        out += "  " + b + " = " + b + " - " + std::to_string(1 + rng.below(5)) + " ;\n";
        break;
      case 4:
        out += "  while ( " + local + " < " + std::to_string(10 + rng.below(50)) + " ) {\n    " +
               local + " = " + local + " * 2 ;\n  }\n";
        break;
      case 5:
        out += "  // adjust " + local + "\n  " + local + " = 0 ;\n";
        break;
    }
  }
  if (with_labels && rng.below(3) == 0) {
    out += "  goto finish" + std::to_string(fn_index) + " ;\n";
    out += "  " + local + " = 1 ;\n";
    out += "  finish" + std::to_string(fn_index) + " : " + local + " = 2 ;\n";
  }
  if (returns_object) {
    out += force_null_return || rng.below(2) == 0 ? "  return null ;\n"
                                                  : "  return \"" + a + "-done\" ;\n";
  } else {
    out += "  return " + local + " ;\n";
  }
  out += "}\n";
  return out;
}

}  // namespace

std::string random_unit_source(std::uint64_t seed) {
  Rng rng(seed);
  std::string out = "/* generated fixture unit */\n";
  int functions = 2 + static_cast<int>(rng.below(3));
  for (int f = 0; f < functions; ++f) {
    out += make_function(rng, f, true, false);
    out += "\n";
  }
  return out;
}

std::vector<TrainingPair> planted_sequences(int count, int budget, std::uint64_t seed) {
  static const std::array<const char*, 18> filler = {
      "if", "(", ")", "{", "}", ";",  "return", "int",  "+",
      "=",  "0", "1", ">", "<", "while", "vr_1", "vr_2", "fn_1"};
  Rng rng(seed);
  std::vector<TrainingPair> pairs;
  pairs.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    bool positive = rng.below(2) == 0;
    std::size_t before = 6 + rng.below(30);
    std::size_t after = 2 + rng.below(20);
    AnnotatedSequence seq;
    seq.mutant_id = "seq_" + std::to_string(i);
    for (std::size_t k = 0; k < before; ++k) seq.tokens.push_back(pick(rng, filler));
    if (positive) {
      // keep the trigger close enough to survive any budget >= 25
      std::size_t at = before - 1 - rng.below(std::min<std::size_t>(before, 8));
      seq.tokens[at] = "trigger_tok";
    }
    seq.tokens.push_back("MST[");
    seq.tokens.push_back(pick(rng, kOperators));
    seq.tokens.push_back("]MSP[");
    seq.tokens.push_back("]");
    for (std::size_t k = 0; k < after; ++k) seq.tokens.push_back(pick(rng, filler));

    AnnotatedSequence windowed = window_sequence(seq, budget);
    pairs.push_back(make_training_pair(windowed, positive ? SeqLabel::S : SeqLabel::N));
  }
  return pairs;
}

KillMatrix random_kill_matrix(std::size_t max_mutants, std::size_t max_tests, std::uint64_t seed) {
  Rng rng(seed);
  std::size_t m = 1 + rng.below(max_mutants);
  std::size_t t = 1 + rng.below(max_tests);
  std::vector<std::string> mutant_ids, test_ids;
  for (std::size_t i = 0; i < m; ++i) mutant_ids.push_back("m" + std::to_string(i));
  for (std::size_t i = 0; i < t; ++i) test_ids.push_back("t" + std::to_string(i));
  KillMatrix matrix(mutant_ids, test_ids);
  double density = 0.08 + 0.4 * rng.unit();
  for (std::size_t mi = 0; mi < m; ++mi)
    for (std::size_t ti = 0; ti < t; ++ti)
      if (rng.unit() < density) matrix.add_kill(mutant_ids[mi], test_ids[ti], "synthetic");
  return matrix;
}

namespace {

bool statement_ends_with_null(const std::vector<Token>& tokens, std::size_t stmt) {
  std::vector<const Token*> in_stmt;
  for (const Token& t : tokens) {
    if (t.kind == TokenKind::Comment) continue;
    if (t.statement_index == stmt) in_stmt.push_back(&t);
  }
  return in_stmt.size() >= 2 && in_stmt[in_stmt.size() - 2]->text == "null" &&
         in_stmt.back()->text == ";";
}

int operator_code(const std::string& name) {
  for (std::size_t i = 0; i < kOperators.size(); ++i)
    if (name == kOperators[i]) return static_cast<int>(i);
  return static_cast<int>(kOperators.size());
}

int token_code(const Token& t) {
  switch (t.kind) {
    case TokenKind::Keyword:
      return static_cast<int>(t.text.size());  // stable small code per keyword
    case TokenKind::Identifier:
      return 40;
    case TokenKind::NumericLiteral:
      return 41;
    case TokenKind::StringLiteral:
      return 42;
    default:
      return 43;
  }
}

std::vector<double> feature_row(const std::vector<Token>& tokens, std::size_t stmt,
                                const std::string& op) {
  std::vector<const Token*> in_stmt;
  std::vector<const Token*> all;
  for (const Token& t : tokens) {
    if (t.kind == TokenKind::Comment) continue;
    all.push_back(&t);
    if (t.statement_index == stmt) in_stmt.push_back(&t);
  }

  int depth = 0;
  int depth_at_stmt = 0;
  std::map<std::size_t, int> stmt_depth;
  for (const Token* t : all) {
    if (!stmt_depth.count(t->statement_index)) stmt_depth[t->statement_index] = depth;
    if (t->text == "{") ++depth;
    if (t->text == "}") --depth;
  }
  depth_at_stmt = stmt_depth[stmt];
  int in_block = 0;
  for (const auto& [s, d] : stmt_depth)
    if (d == depth_at_stmt) ++in_block;

  double stmt_len = static_cast<double>(in_stmt.size());
  double ops_in_stmt = 0;
  std::set<std::string> idents;
  for (const Token* t : in_stmt) {
    if (t->kind == TokenKind::Punctuation && t->text != ";" && t->text != "{" && t->text != "}")
      ++ops_in_stmt;
    if (t->kind == TokenKind::Identifier) idents.insert(t->text);
  }
  const Token* head = in_stmt.empty() ? nullptr : in_stmt.front();
  bool branch_head = head && (head->text == "if" || head->text == "while" || head->text == "for");

  std::vector<double> row;
  row.push_back(stmt_len);                                        // statementComplexity
  row.push_back(ops_in_stmt);                                     // expressionComplexity
  row.push_back(operator_code(op));                               // MutantType
  row.push_back(depth_at_stmt);                                   // BlockDepth
  row.push_back(static_cast<double>(stmt));                       // CfgDepth
  row.push_back(stmt == 0 ? 0 : 1);                               // CfgPredNum
  row.push_back(branch_head ? 2 : 1);                             // CfgSuccNum
  row.push_back(in_block);                                        // NumInBlock
  row.push_back(static_cast<double>(idents.size()));              // NumOutDataDeps
  row.push_back(stmt_len - static_cast<double>(idents.size()));   // NumInDataDeps
  row.push_back(depth_at_stmt > 0 ? depth_at_stmt - 1 : 0);       // NumOutCtrlDeps
  row.push_back(depth_at_stmt);                                   // NumInCtrlDeps
  row.push_back(depth_at_stmt > 1 ? 1 : 0);                       // AstNodeParentType
  row.push_back(depth_at_stmt + 1);                               // NumberOfAstParents
  row.push_back(head ? token_code(*head) : 0);                    // AstNodeType
  row.push_back(stmt_len / 2.0);                                  // NumberOfAstChildren
  return row;
}

}  // namespace

void write_toy_corpus(const std::filesystem::path& root, const ToyCorpusConfig& config) {
  if (config.projects < 1) throw Error("invalid_config", "need at least one project");
  static const std::array<const char*, 8> kProjectNames = {"alpha",   "bravo", "charlie", "delta",
                                                           "echo",    "foxtrot", "golf",  "hotel"};
  Rng rng(config.seed);

  Corpus corpus;
  FeatureTable features;
  features.schema.names = standard_feature_names();
  for (const auto& name : features.schema.names)
    features.schema.categorical.push_back(name.size() > 4 &&
                                          name.compare(name.size() - 4, 4, "Type") == 0);

  struct PlannedKill {
    std::string mutant_id;
    bool strong = false;       // planted subsuming: singleton kill set
    bool equivalent = false;
  };
  std::vector<std::string> mutant_order;
  std::vector<std::string> test_order;
  std::vector<std::pair<std::string, std::string>> kill_pairs;

  for (int p = 0; p < config.projects; ++p) {
    std::string project = p < static_cast<int>(kProjectNames.size())
                              ? kProjectNames[static_cast<std::size_t>(p)]
                              : "proj" + std::to_string(p);
    std::vector<PlannedKill> project_mutants;

    for (int u = 0; u < config.units_per_project; ++u) {
      SourceUnit unit;
      unit.path = "units/" + project + "_" + std::to_string(u) + ".mini";
      unit.project_id = project;
      std::string text = "// unit " + std::to_string(u) + " of " + project + "\n";
      for (int f = 0; f < config.functions_per_unit; ++f)
        text += make_function(rng, f + u * config.functions_per_unit, false, f == 0) + "\n";
      unit.text = text;

      std::vector<Token> tokens = tokenize(text);
      unit.statement_count = statement_count(tokens);

      for (std::size_t s = 0; s < unit.statement_count; ++s) {
        std::size_t stmt_tokens = 0;
        for (const Token& t : tokens)
          if (t.kind != TokenKind::Comment && t.statement_index == s) ++stmt_tokens;
        if (stmt_tokens < 2) continue;

        bool null_end = statement_ends_with_null(tokens, s);
        int mutants_here = null_end ? 2 : (rng.below(3) < 2 ? 1 : 0);
        for (int k = 0; k < mutants_here; ++k) {
          MutantRecord m;
          m.mutant_id = project + "_m" + std::to_string(project_mutants.size());
          m.project_id = project;
          m.unit_path = unit.path;
          m.statement_index = s;
          if (null_end) {
            // first mutant on a null-ending statement is the planted positive
            m.operator_name = k == 0 ? kOperators[0] : kOperators[1 + rng.below(5)];
          } else {
            m.operator_name = kOperators[rng.below(kOperators.size())];
          }
          bool strong = null_end && m.operator_name == kOperators[0];
          bool equivalent = !strong && rng.below(5) == 0;
          project_mutants.push_back({m.mutant_id, strong, equivalent});
          mutant_order.push_back(m.mutant_id);
          features.mutant_ids.push_back(m.mutant_id);
          features.values.push_back(feature_row(tokens, s, m.operator_name));
          corpus.mutants.push_back(std::move(m));
        }
      }
      corpus.units.push_back(std::move(unit));
    }

    // Planted kill structure: every strong mutant owns a singleton kill set,
    // weak killable mutants strictly contain one, so computed subsumption
    // recovers exactly the planted positives.
    std::vector<std::size_t> strong_idx;
    for (std::size_t i = 0; i < project_mutants.size(); ++i)
      if (project_mutants[i].strong) strong_idx.push_back(i);
    if (strong_idx.empty())
      throw Error("invalid_config", "toy corpus generation produced no strong mutant for " +
                                        project + "; increase functions_per_unit");

    std::vector<std::string> strong_tests;
    for (std::size_t s = 0; s < strong_idx.size(); ++s) {
      std::string tid = project + "_ts" + std::to_string(s);
      strong_tests.push_back(tid);
      test_order.push_back(tid);
      kill_pairs.emplace_back(project_mutants[strong_idx[s]].mutant_id, tid);
    }
    std::size_t weak_tests = 1 + project_mutants.size() / 12;
    std::vector<std::string> extra_tests;
    for (std::size_t w = 0; w < weak_tests; ++w) {
      std::string tid = project + "_tw" + std::to_string(w);
      extra_tests.push_back(tid);
      test_order.push_back(tid);
    }
    for (const auto& pm : project_mutants) {
      if (pm.strong || pm.equivalent) continue;
      // one strong singleton plus one weak-only test: a strict superset of a
      // minimal set, so the mutant can never join a minimal group
      kill_pairs.emplace_back(pm.mutant_id, strong_tests[rng.below(strong_tests.size())]);
      kill_pairs.emplace_back(pm.mutant_id, extra_tests[rng.below(extra_tests.size())]);
      if (rng.below(2) == 0)
        kill_pairs.emplace_back(pm.mutant_id, strong_tests[rng.below(strong_tests.size())]);
    }
  }

  corpus.kills = KillMatrix(mutant_order, test_order);
  for (const auto& [mid, tid] : kill_pairs) corpus.kills.add_kill(mid, tid, "planted");
  corpus.features = std::move(features);

  save_corpus(corpus, root);
}

}  // namespace mutlab
