#include "mutlab/simulation.hpp"

#include <algorithm>
#include <cmath>

#include "mutlab/error.hpp"
#include "mutlab/rng.hpp"

namespace mutlab {

RepetitionRecord simulate(const std::vector<std::size_t>& selected_order, const KillMatrix& matrix,
                          const GroundTruth& labels, double target_ms_star, std::uint64_t seed) {
  if (selected_order.empty()) throw Error("empty_selection", "no mutants selected for analysis");
  std::size_t subsuming_total = labels.count(MutantFate::Subsuming);
  if (subsuming_total == 0)
    throw Error("no_subsuming_mutants", "simulation needs a nonempty subsuming set");

  Rng rng(seed);
  RepetitionRecord rec;

  std::vector<std::size_t> survivors = selected_order;  // C, in analysis order
  BitRow suite_kills(matrix.mutant_count());            // mutants killed by the suite so far
  double current = 0;

  auto ms_star = [&]() {
    std::size_t killed = 0;
    for (std::size_t mi = 0; mi < matrix.mutant_count(); ++mi)
      if (labels.fate[mi] == MutantFate::Subsuming && suite_kills.test(mi)) ++killed;
    return static_cast<double>(killed) / static_cast<double>(subsuming_total);
  };

  while (current < target_ms_star && !survivors.empty()) {
    std::size_t m = survivors.front();
    ++rec.analyzed;
    const BitRow& killers = matrix.row(m);
    if (killers.any()) {
      // pick one killing test uniformly at random
      std::size_t nth = static_cast<std::size_t>(rng.below(killers.count()));
      std::size_t test = 0;
      for (std::size_t ti = 0, seen = 0; ti < matrix.test_count(); ++ti) {
        if (!killers.test(ti)) continue;
        if (seen++ == nth) {
          test = ti;
          break;
        }
      }
      rec.chosen_tests.push_back(test);
      // run the new test against every survivor, the picked mutant included
      rec.test_executions += static_cast<long long>(survivors.size());
      for (std::size_t mi = 0; mi < matrix.mutant_count(); ++mi)
        if (matrix.kills(mi, test)) suite_kills.set(mi);
      std::erase_if(survivors, [&](std::size_t s) { return matrix.kills(s, test); });
    } else {
      ++rec.equivalents;  // judged equivalent, discarded
      survivors.erase(survivors.begin());
    }
    current = ms_star();
    rec.trajectory.push_back(current);
  }

  rec.final_ms_star = current;
  rec.reached_target = current >= target_ms_star;
  return rec;
}

double SimulationResult::mean_final_ms_star() const {
  if (repetitions.empty()) return 0;
  double sum = 0;
  for (const auto& r : repetitions) sum += r.final_ms_star;
  return sum / static_cast<double>(repetitions.size());
}

SimulationResult repeat_simulations(const std::vector<std::size_t>& selected,
                                    const KillMatrix& matrix, const GroundTruth& labels,
                                    const SimulationConfig& config) {
  if (config.repetitions < 1)
    throw Error("invalid_config", "repetitions must be at least 1");
  SimulationResult result;
  result.repetitions.reserve(static_cast<std::size_t>(config.repetitions));
  for (int rep = 0; rep < config.repetitions; ++rep) {
    std::uint64_t seed = derive_seed(config.master_seed, static_cast<std::uint64_t>(rep));
    std::vector<std::size_t> order = selected;
    if (config.order == OrderPolicy::ShufflePerRep) {
      Rng shuffler(derive_seed(seed, 0x5e1ec7));
      shuffler.shuffle(order);
    }
    if (config.truncate_to > 0 && order.size() > config.truncate_to)
      order.resize(config.truncate_to);
    result.repetitions.push_back(simulate(order, matrix, labels, config.target_ms_star, seed));
  }
  return result;
}

EffortResult effort_to_reach(const std::vector<std::size_t>& ranking, const KillMatrix& matrix,
                             const GroundTruth& labels, double target_ms_star, std::uint64_t seed) {
  EffortResult out;
  if (target_ms_star <= 0) {
    out.reached = true;
    return out;
  }
  RepetitionRecord rec = simulate(ranking, matrix, labels, target_ms_star, seed);
  out.reached = rec.reached_target;
  out.analyzed = rec.analyzed;
  out.test_executions = rec.test_executions;
  out.final_ms_star = rec.final_ms_star;
  return out;
}

GroundTruth inject_noise(const GroundTruth& labels, const NoiseConfig& noise) {
  if (noise.rate < 0 || noise.rate > 1)
    throw Error("invalid_config", "noise rate must lie in [0, 1]");
  GroundTruth out = labels;
  if (noise.rate == 0) return out;

  std::vector<std::size_t> equivalents;
  for (std::size_t i = 0; i < labels.fate.size(); ++i)
    if (labels.fate[i] == MutantFate::Equivalent) equivalents.push_back(i);
  if (equivalents.empty())
    throw Error("no_equivalents", "noise injection needs at least one equivalent mutant");

  std::size_t base = noise.fraction_of_all ? labels.fate.size() : equivalents.size();
  auto flips = static_cast<std::size_t>(std::llround(noise.rate * static_cast<double>(base)));
  flips = std::min(flips, equivalents.size());

  Rng rng(noise.seed);
  rng.shuffle(equivalents);
  for (std::size_t i = 0; i < flips; ++i) out.fate[equivalents[i]] = MutantFate::Subsuming;
  return out;
}

}  // namespace mutlab
