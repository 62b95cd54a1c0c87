#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mutlab/corpus.hpp"
#include "mutlab/subsumption.hpp"

namespace mutlab {

enum class OrderPolicy {
  FixedRanking,    // analyze in the given order every repetition
  ShufflePerRep,   // unordered selection: fresh uniform order per repetition
};

struct SimulationConfig {
  double target_ms_star = 1.0;  // in (0, 1]
  int repetitions = 1000;
  std::uint64_t master_seed = 0;
  OrderPolicy order = OrderPolicy::ShufflePerRep;
  // keep only the first N mutants of each repetition's order (0 = all);
  // with ShufflePerRep this draws a fresh uniform selection per repetition
  std::size_t truncate_to = 0;
};

struct RepetitionRecord {
  double final_ms_star = 0;
  int analyzed = 0;
  int equivalents = 0;            // analyzed mutants judged equivalent
  long long test_executions = 0;
  bool reached_target = false;
  std::vector<std::size_t> chosen_tests;  // matrix test indices, in pick order
  std::vector<double> trajectory;         // MS* after each analyzed mutant
};

// One pass of the mutation-guided testing loop: pick the next selected
// mutant; if the pool kills it, add a uniformly drawn killing test to the
// suite, charge |survivors| executions, and remove everything the test kills;
// otherwise count it as an analyzed equivalent. MS* is evaluated against the
// full corpus's subsuming set after every step; the loop stops at the target
// score or when the selection is exhausted.
RepetitionRecord simulate(const std::vector<std::size_t>& selected_order, const KillMatrix& matrix,
                          const GroundTruth& labels, double target_ms_star, std::uint64_t seed);

struct SimulationResult {
  std::vector<RepetitionRecord> repetitions;

  double mean_final_ms_star() const;
};

// Runs config.repetitions independent simulations; repetition i draws its
// seed from hash(master_seed, i). ShufflePerRep reshuffles the selection
// before each repetition, FixedRanking keeps the given order.
SimulationResult repeat_simulations(const std::vector<std::size_t>& selected,
                                    const KillMatrix& matrix, const GroundTruth& labels,
                                    const SimulationConfig& config);

struct EffortResult {
  bool reached = false;
  int analyzed = 0;
  long long test_executions = 0;
  double final_ms_star = 0;
};

// Effort at the first trajectory point reaching the target when following a
// fixed ranking; unreached when the ranking is exhausted below the target.
EffortResult effort_to_reach(const std::vector<std::size_t>& ranking, const KillMatrix& matrix,
                             const GroundTruth& labels, double target_ms_star, std::uint64_t seed);

struct NoiseConfig {
  double rate = 0;  // fraction in [0, 1]
  std::uint64_t seed = 0;
  bool fraction_of_all = false;  // flip count based on |mutants| instead of |equivalents|
};

// Relabels exactly round(rate * base) uniformly chosen equivalent mutants as
// subsuming; killable labels are untouched and the input is not modified.
GroundTruth inject_noise(const GroundTruth& labels, const NoiseConfig& noise);

}  // namespace mutlab
