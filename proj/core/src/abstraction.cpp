#include "mutlab/abstraction.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "mutlab/corpus.hpp"
#include "mutlab/error.hpp"
#include "mutlab/textio.hpp"

namespace mutlab {

namespace {

const std::set<std::string>& keywords() {
  static const std::set<std::string> kw = {
      "if",     "else",   "while",    "for",     "do",      "return", "goto",
      "break",  "continue", "switch", "case",    "default", "int",    "long",
      "short",  "char",   "float",    "double",  "void",    "bool",   "unsigned",
      "signed", "const",  "static",   "struct",  "enum",    "union",  "typedef",
      "sizeof", "new",    "delete",   "class",   "public",  "private", "protected",
      "final"};
  return kw;
}

bool is_type_keyword(const std::string& t) {
  static const std::set<std::string> kw = {"int",  "long",   "short",  "char", "float",
                                           "double", "void", "bool",   "unsigned", "signed"};
  return kw.count(t) > 0;
}

// Longest first so maximal munch works with a linear scan.
const std::array<const char*, 22>& multi_punct() {
  static const std::array<const char*, 22> ops = {
      "<<=", ">>=", "==", "!=", "<=", ">=", "&&", "||", "->", "++", "--",
      "+=",  "-=",  "*=", "/=", "%=", "&=", "|=", "^=", "<<", ">>", "[]"};
  return ops;
}

bool is_single_punct(char c) {
  return std::string_view("(){}[];,.<>=!&|^~+-*/%?:#").find(c) != std::string_view::npos;
}

struct Cursor {
  std::string_view text;
  std::size_t pos = 0;
  std::size_t line = 1;
  std::size_t col = 1;

  bool done() const { return pos >= text.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos + ahead < text.size() ? text[pos + ahead] : '\0';
  }
  void advance() {
    if (text[pos] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++pos;
  }
  std::string where() const { return std::to_string(line) + ":" + std::to_string(col); }
};

}  // namespace

std::vector<Token> tokenize(std::string_view source) {
  std::vector<Token> tokens;
  Cursor c{source};
  std::size_t statement = 0;

  auto push = [&](std::string text, TokenKind kind) {
    tokens.push_back(Token{std::move(text), kind, statement});
    if (kind != TokenKind::Comment) {
      const std::string& t = tokens.back().text;
      if (t == ";" || t == "{" || t == "}") ++statement;
    }
  };

  while (!c.done()) {
    char ch = c.peek();
    if (std::isspace(static_cast<unsigned char>(ch))) {
      c.advance();
      continue;
    }
    if (ch == '/' && c.peek(1) == '/') {
      std::string text;
      while (!c.done() && c.peek() != '\n') {
        text += c.peek();
        c.advance();
      }
      push(std::move(text), TokenKind::Comment);
      continue;
    }
    if (ch == '/' && c.peek(1) == '*') {
      std::string start = c.where();
      std::string text = "/*";
      c.advance();
      c.advance();
      bool closed = false;
      while (!c.done()) {
        if (c.peek() == '*' && c.peek(1) == '/') {
          text += "*/";
          c.advance();
          c.advance();
          closed = true;
          break;
        }
        text += c.peek();
        c.advance();
      }
      if (!closed) throw Error("tokenize_error", start + ": unterminated comment");
      push(std::move(text), TokenKind::Comment);
      continue;
    }
    if (ch == '"') {
      std::string start = c.where();
      std::string text = "\"";
      c.advance();
      bool closed = false;
      while (!c.done() && c.peek() != '\n') {
        char q = c.peek();
        if (q == '\\') {
          text += q;
          c.advance();
          if (c.done()) break;
          text += c.peek();
          c.advance();
          continue;
        }
        text += q;
        c.advance();
        if (q == '"') {
          closed = true;
          break;
        }
      }
      if (!closed) throw Error("tokenize_error", start + ": unterminated string literal");
      push(std::move(text), TokenKind::StringLiteral);
      continue;
    }
    if (ch == '\'') {
      std::string start = c.where();
      std::string text = "'";
      c.advance();
      bool closed = false;
      while (!c.done() && c.peek() != '\n') {
        char q = c.peek();
        if (q == '\\') {
          text += q;
          c.advance();
          if (c.done()) break;
          text += c.peek();
          c.advance();
          continue;
        }
        text += q;
        c.advance();
        if (q == '\'') {
          closed = true;
          break;
        }
      }
      if (!closed) throw Error("tokenize_error", start + ": unterminated character literal");
      push(std::move(text), TokenKind::NumericLiteral);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      std::string text;
      while (!c.done()) {
        char q = c.peek();
        if (std::isalnum(static_cast<unsigned char>(q)) || q == '_' || q == '.') {
          text += q;
          c.advance();
        } else {
          break;
        }
      }
      push(std::move(text), TokenKind::NumericLiteral);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::string text;
      while (!c.done()) {
        char q = c.peek();
        if (std::isalnum(static_cast<unsigned char>(q)) || q == '_') {
          text += q;
          c.advance();
        } else {
          break;
        }
      }
      TokenKind kind = keywords().count(text) ? TokenKind::Keyword : TokenKind::Identifier;
      push(std::move(text), kind);
      continue;
    }
    bool matched = false;
    for (const char* op : multi_punct()) {
      std::string_view sv(op);
      if (source.substr(c.pos, sv.size()) == sv) {
        for (std::size_t i = 0; i < sv.size(); ++i) c.advance();
        push(std::string(sv), TokenKind::Punctuation);
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (is_single_punct(ch)) {
      std::string text(1, ch);
      c.advance();
      push(std::move(text), TokenKind::Punctuation);
      continue;
    }
    throw Error("tokenize_error", c.where() + ": unexpected character '" + std::string(1, ch) + "'");
  }
  return tokens;
}

std::size_t statement_count(const std::vector<Token>& tokens) {
  std::size_t max_index = 0;
  bool any = false;
  for (const Token& t : tokens) {
    if (t.kind == TokenKind::Comment) continue;
    max_index = std::max(max_index, t.statement_index);
    any = true;
  }
  return any ? max_index + 1 : 0;
}

namespace {

constexpr const char* kCategoryPrefix[5] = {"fn", "tp", "lb", "vr", "lr"};

}  // namespace

const std::string& AbstractionMap::map_name(const std::string& name, NameCategory category) {
  for (auto& bucket : entries_)
    for (auto& [orig, id] : bucket)
      if (orig == name) return id;
  auto& bucket = entries_[static_cast<int>(category)];
  std::string id = std::string(kCategoryPrefix[static_cast<int>(category)]) + "_" +
                   std::to_string(bucket.size() + 1);
  bucket.emplace_back(name, std::move(id));
  return bucket.back().second;
}

std::optional<std::string> AbstractionMap::id_of(const std::string& name) const {
  for (const auto& bucket : entries_)
    for (const auto& [orig, id] : bucket)
      if (orig == name) return id;
  return std::nullopt;
}

std::optional<std::string> AbstractionMap::original_of(const std::string& id) const {
  for (const auto& bucket : entries_)
    for (const auto& [orig, mapped] : bucket)
      if (mapped == id) return orig;
  return std::nullopt;
}

const std::vector<std::pair<std::string, std::string>>& AbstractionMap::entries(
    NameCategory category) const {
  return entries_[static_cast<int>(category)];
}

const std::set<std::string>& default_allowlist() {
  static const std::set<std::string> names = {"String", "null", "true", "false", "NULL", "this"};
  return names;
}

std::set<std::string> load_allowlist(const std::string& path) {
  std::set<std::string> names;
  for (const std::string& line : read_lines(path)) {
    if (line.empty() || line[0] == '#') continue;
    names.insert(line);
  }
  return names;
}

namespace {

// Works over the comment-free token view; classifies the first occurrence of
// a user identifier from its declaration context.
class Classifier {
 public:
  Classifier(const std::vector<Token>& tokens, const std::set<std::string>& allowlist)
      : tokens_(tokens), allowlist_(allowlist) {}

  NameCategory classify(std::size_t i, const AbstractionMap& map, bool& resolved) const {
    resolved = true;
    if (prev_text(i) == "goto") return NameCategory::Label;
    if (starts_statement(i) && next_text(i) == ":") return NameCategory::Label;
    if (next_text(i) == "(") return NameCategory::Function;
    const std::string& p = prev_text(i);
    if (p == "struct" || p == "enum" || p == "union" || p == "class" || p == "typedef" ||
        p == "new")
      return NameCategory::Type;
    if (next_kind(i) == TokenKind::Identifier) return NameCategory::Type;
    if ((next_text(i) == "[]" || next_text(i) == "*") &&
        next_kind(i, 2) == TokenKind::Identifier)
      return NameCategory::Type;
    if (!declaration_context(i, map)) resolved = false;
    return NameCategory::Variable;
  }

 private:
  const std::string& prev_text(std::size_t i, std::size_t back = 1) const {
    static const std::string empty;
    return i >= back ? tokens_[i - back].text : empty;
  }
  const std::string& next_text(std::size_t i, std::size_t ahead = 1) const {
    static const std::string empty;
    return i + ahead < tokens_.size() ? tokens_[i + ahead].text : empty;
  }
  TokenKind next_kind(std::size_t i, std::size_t ahead = 1) const {
    return i + ahead < tokens_.size() ? tokens_[i + ahead].kind : TokenKind::Punctuation;
  }
  bool starts_statement(std::size_t i) const {
    return i == 0 || tokens_[i - 1].statement_index != tokens_[i].statement_index;
  }

  // True when the identifier is introduced by a type: walks back over
  // array/pointer/reference marks to a type keyword, an allow-listed name or
  // a name already in the type namespace.
  bool declaration_context(std::size_t i, const AbstractionMap& map) const {
    std::size_t back = 1;
    while (i >= back &&
           (prev_text(i, back) == "[]" || prev_text(i, back) == "*" || prev_text(i, back) == "&"))
      ++back;
    if (i < back) return false;
    const Token& t = tokens_[i - back];
    if (t.kind == TokenKind::Keyword && is_type_keyword(t.text)) return true;
    if (t.kind != TokenKind::Identifier) return false;
    if (allowlist_.count(t.text)) return true;
    auto id = map.id_of(t.text);
    return id && id->rfind("tp_", 0) == 0;
  }

  const std::vector<Token>& tokens_;
  const std::set<std::string>& allowlist_;
};

}  // namespace

std::pair<std::vector<Token>, AbstractionMap> abstract_unit(const std::vector<Token>& tokens,
                                                            const AbstractionOptions& options) {
  std::vector<Token> view;
  view.reserve(tokens.size());
  for (const Token& t : tokens)
    if (t.kind != TokenKind::Comment) view.push_back(t);

  AbstractionMap map;
  if (!options.enabled) return {std::move(view), std::move(map)};

  const std::set<std::string>& allow =
      options.allowlist.empty() ? default_allowlist() : options.allowlist;
  Classifier classifier(view, allow);

  std::vector<Token> out;
  out.reserve(view.size());
  for (std::size_t i = 0; i < view.size(); ++i) {
    Token t = view[i];
    if (t.kind == TokenKind::StringLiteral) {
      t.text = map.map_name(t.text, NameCategory::StringLit);
    } else if (t.kind == TokenKind::Identifier && !allow.count(t.text)) {
      if (auto existing = map.id_of(t.text)) {
        t.text = *existing;
      } else {
        bool resolved = true;
        NameCategory category = classifier.classify(i, map, resolved);
        if (!resolved) map.add_warning(t.text);
        t.text = map.map_name(t.text, category);
      }
    }
    out.push_back(std::move(t));
  }
  return {std::move(out), std::move(map)};
}

namespace {

constexpr const char* kAnnStart = "MST[";
constexpr const char* kAnnMid = "]MSP[";
constexpr const char* kAnnEnd = "]";

}  // namespace

std::size_t AnnotatedSequence::annotation_start() const {
  for (std::size_t i = 0; i < tokens.size(); ++i)
    if (tokens[i] == kAnnStart) return i;
  throw Error("invalid_sequence", "sequence for " + mutant_id + " carries no annotation");
}

AnnotatedSequence insert_annotation(const std::vector<Token>& tokens, const MutantRecord& mutant) {
  std::size_t statements = statement_count(tokens);
  if (mutant.statement_index >= statements)
    throw Error("statement_out_of_range",
                mutant.mutant_id + ": statement index " + std::to_string(mutant.statement_index) +
                    " out of range (unit has " + std::to_string(statements) + " statements)");

  AnnotatedSequence seq;
  seq.mutant_id = mutant.mutant_id;
  seq.tokens.reserve(tokens.size() + kAnnotationTokens);

  std::size_t insert_after = 0;
  bool found = false;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].kind == TokenKind::Comment) continue;
    if (tokens[i].statement_index == mutant.statement_index) {
      insert_after = i;
      found = true;
    }
  }
  if (!found)
    throw Error("statement_out_of_range", mutant.mutant_id + ": statement " +
                                              std::to_string(mutant.statement_index) +
                                              " holds no tokens");

  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].kind == TokenKind::Comment) continue;
    seq.tokens.push_back(tokens[i].text);
    if (i == insert_after) {
      seq.tokens.push_back(kAnnStart);
      seq.tokens.push_back(mutant.operator_name);
      seq.tokens.push_back(kAnnMid);
      seq.tokens.push_back(kAnnEnd);
    }
  }
  return seq;
}

AnnotatedSequence window_sequence(const AnnotatedSequence& seq, int budget) {
  std::size_t start = seq.annotation_start();
  std::size_t ann_len = (start + 3 < seq.tokens.size() && seq.tokens[start + 3] == kAnnEnd)
                            ? kAnnotationTokens
                            : kAnnotationTokens + 1;
  if (budget < static_cast<int>(ann_len))
    throw Error("budget_too_small", "budget " + std::to_string(budget) +
                                        " cannot hold the annotation (" + std::to_string(ann_len) +
                                        " tokens)");

  std::size_t avail_before = start;
  std::size_t avail_after = seq.tokens.size() - start - ann_len;
  std::size_t room = static_cast<std::size_t>(budget) - ann_len;
  std::size_t want_before = (room + 1) / 2;
  std::size_t want_after = room / 2;

  std::size_t take_before = std::min(want_before, avail_before);
  std::size_t take_after = std::min(want_after, avail_after);
  std::size_t spare = room - take_before - take_after;
  if (spare > 0) {
    std::size_t extra_after = std::min(spare, avail_after - take_after);
    take_after += extra_after;
    spare -= extra_after;
    take_before += std::min(spare, avail_before - take_before);
  }

  AnnotatedSequence out;
  out.mutant_id = seq.mutant_id;
  out.label = seq.label;
  out.length_budget = budget;
  auto first = seq.tokens.begin() + static_cast<std::ptrdiff_t>(start - take_before);
  auto last = seq.tokens.begin() + static_cast<std::ptrdiff_t>(start + ann_len + take_after);
  out.tokens.assign(first, last);
  return out;
}

std::string render_input(const AnnotatedSequence& seq) { return join(seq.tokens, " "); }

std::pair<std::string, std::string> render_pair(const AnnotatedSequence& seq, SeqLabel label) {
  std::size_t start = seq.annotation_start();
  if (start + 3 >= seq.tokens.size() || seq.tokens[start + 3] != kAnnEnd)
    throw Error("invalid_sequence", "label slot of " + seq.mutant_id + " is not empty");
  std::vector<std::string> output = seq.tokens;
  output.insert(output.begin() + static_cast<std::ptrdiff_t>(start) + 3,
                std::string(1, label_char(label)));
  return {join(seq.tokens, " "), join(output, " ")};
}

}  // namespace mutlab
