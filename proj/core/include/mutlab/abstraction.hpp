#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mutlab {

struct MutantRecord;

enum class TokenKind { Keyword, Identifier, StringLiteral, NumericLiteral, Punctuation, Comment };

struct Token {
  std::string text;
  TokenKind kind = TokenKind::Punctuation;
  std::size_t statement_index = 0;
};

// Lexes a source unit of the mini-language (a C-like subset with explicit
// declarations). Statement boundaries fall after ';', '{' and '}'.
// Joining the non-comment token texts with single spaces reproduces the
// source modulo whitespace.
std::vector<Token> tokenize(std::string_view source);

// Number of statements in a token stream (max statement index + 1).
std::size_t statement_count(const std::vector<Token>& tokens);

enum class NameCategory { Function, Type, Label, Variable, StringLit };

// Per-unit renaming of user-defined entities to positional IDs:
// fn_n, tp_n, lb_n, vr_n, lr_n, numbered from 1 in first-occurrence order,
// one namespace per category. The same original name always receives the
// same ID.
class AbstractionMap {
 public:
  // Returns the ID for name, allocating the next number in the category on
  // first sight. A name already mapped keeps its original category.
  const std::string& map_name(const std::string& name, NameCategory category);

  std::optional<std::string> id_of(const std::string& name) const;

  // Inverts a substituted ID back to the original text.
  std::optional<std::string> original_of(const std::string& id) const;

  // Entries of one category in first-occurrence order.
  const std::vector<std::pair<std::string, std::string>>& entries(NameCategory category) const;

  // Names whose category could not be resolved from declaration context and
  // fell back to the variable namespace.
  const std::vector<std::string>& warnings() const { return warnings_; }
  void add_warning(const std::string& name) { warnings_.push_back(name); }

 private:
  std::vector<std::pair<std::string, std::string>> entries_[5];
  std::vector<std::string> warnings_;
};

struct AbstractionOptions {
  bool enabled = true;                 // false: drop comments only
  std::set<std::string> allowlist;     // language-standard names kept verbatim
};

// Built-in allow-list ("String", "null", ...). A configured allow-list file
// replaces it.
const std::set<std::string>& default_allowlist();

std::set<std::string> load_allowlist(const std::string& path);

// Replaces user-defined function/type/label/variable names and string
// literals with positional IDs; keywords, punctuation, numeric literals and
// allow-listed names pass through. Comments are dropped. Token kinds and
// statement indices are preserved, so the operation is idempotent.
std::pair<std::vector<Token>, AbstractionMap> abstract_unit(const std::vector<Token>& tokens,
                                                            const AbstractionOptions& options = {});

enum class SeqLabel { S, N };

inline char label_char(SeqLabel l) { return l == SeqLabel::S ? 'S' : 'N'; }

// Token window around a mutation annotation. The annotation occupies four
// tokens while the label slot is empty: MST[ <operator> ]MSP[ ]
struct AnnotatedSequence {
  std::string mutant_id;
  std::vector<std::string> tokens;
  int length_budget = 0;  // 0 until windowed
  std::optional<SeqLabel> label;

  // Index of the "MST[" token.
  std::size_t annotation_start() const;
};

inline constexpr std::size_t kAnnotationTokens = 4;

// Appends the annotation at the end of the mutated statement; label slot empty.
AnnotatedSequence insert_annotation(const std::vector<Token>& tokens, const MutantRecord& mutant);

// Trims to at most budget tokens keeping the annotation intact: ceil(r/2)
// tokens before it and floor(r/2) after, deficits on one side spilling to
// the other.
AnnotatedSequence window_sequence(const AnnotatedSequence& seq, int budget);

// Space-joined sequence with the label slot empty.
std::string render_input(const AnnotatedSequence& seq);

// (input line, output line); the two differ only in the label slot.
std::pair<std::string, std::string> render_pair(const AnnotatedSequence& seq, SeqLabel label);

}  // namespace mutlab
