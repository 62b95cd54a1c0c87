#pragma once

// Brute-force reference implementations kept independent of the library's
// bit-row code paths: everything here works on per-cell scans and std::set.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "mutlab/corpus.hpp"
#include "mutlab/subsumption.hpp"

namespace oracle {

inline std::vector<std::set<std::string>> kill_sets(const mutlab::KillMatrix& matrix) {
  std::vector<std::set<std::string>> sets(matrix.mutant_count());
  for (std::size_t mi = 0; mi < matrix.mutant_count(); ++mi)
    for (std::size_t ti = 0; ti < matrix.test_count(); ++ti)
      if (matrix.kills(mi, ti)) sets[mi].insert(matrix.test_ids()[ti]);
  return sets;
}

inline bool strict_subset(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.size() >= b.size()) return false;
  for (const auto& x : a)
    if (!b.count(x)) return false;
  return true;
}

// O(n^2) pairwise labeling: a killable mutant is subsuming unless some other
// killable mutant's kill set is a strict subset of its own.
inline std::vector<mutlab::MutantFate> labels(const mutlab::KillMatrix& matrix) {
  auto sets = oracle::kill_sets(matrix);
  std::vector<mutlab::MutantFate> out(matrix.mutant_count(), mutlab::MutantFate::Equivalent);
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (sets[i].empty()) continue;
    bool dominated = false;
    for (std::size_t j = 0; j < sets.size(); ++j) {
      if (j == i || sets[j].empty()) continue;
      if (strict_subset(sets[j], sets[i])) {
        dominated = true;
        break;
      }
    }
    out[i] = dominated ? mutlab::MutantFate::Subsumed : mutlab::MutantFate::Subsuming;
  }
  return out;
}

inline double plain_score(const std::vector<std::string>& suite, const mutlab::KillMatrix& matrix) {
  std::size_t killed = 0;
  for (std::size_t mi = 0; mi < matrix.mutant_count(); ++mi) {
    bool hit = false;
    for (const auto& tid : suite) {
      auto ti = matrix.test_index(tid);
      if (ti && matrix.kills(mi, *ti)) hit = true;
    }
    if (hit) ++killed;
  }
  return static_cast<double>(killed) / static_cast<double>(matrix.mutant_count());
}

}  // namespace oracle
