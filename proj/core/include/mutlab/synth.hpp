#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mutlab/corpus.hpp"
#include "mutlab/learner.hpp"

namespace mutlab {

// Deterministic fixture generators used by tests, benchmarks and the `gen`
// subcommand.

// Random mini-language unit for property tests (valid, comment-bearing).
std::string random_unit_source(std::uint64_t seed);

// Sequence corpus with a planted signal: label is S iff `trigger_tok`
// appears in the window. Sequences are windowed to the budget.
std::vector<TrainingPair> planted_sequences(int count, int budget, std::uint64_t seed);

struct ToyCorpusConfig {
  int projects = 5;
  int units_per_project = 3;
  int functions_per_unit = 4;
  std::uint64_t seed = 1;
};

// Writes a complete corpus directory: mini-language units, mutants over their
// statements, a kill matrix whose subsumption structure is planted (mutants
// with a ReturnValsMutator on a `null`-returning statement get minimal
// singleton kill sets), and the 16-column feature file. The planted structure
// makes subsuming-ness predictable from local context.
void write_toy_corpus(const std::filesystem::path& root, const ToyCorpusConfig& config);

// Random kill matrix for oracle-equivalence and property tests.
KillMatrix random_kill_matrix(std::size_t max_mutants, std::size_t max_tests, std::uint64_t seed);

}  // namespace mutlab
