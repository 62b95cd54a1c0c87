#pragma once

#include <span>
#include <vector>

namespace mutlab {

struct ConfusionMatrix {
  long long tp = 0;
  long long fp = 0;
  long long tn = 0;
  long long fn = 0;

  long long total() const { return tp + fp + tn + fn; }
};

// truth / predicted: true = positive class (subsuming / predicted S),
// aligned by index. Equivalent and subsumed mutants both count as negative.
ConfusionMatrix confusion(const std::vector<bool>& truth, const std::vector<bool>& predicted);

// Zero-denominator conventions: precision/recall are 0 when their denominator
// is 0, F is 0 when P+R is 0, MCC is 0 when any marginal is 0.
double precision(const ConfusionMatrix& cm);
double recall(const ConfusionMatrix& cm);
double f_measure(const ConfusionMatrix& cm);
double mcc(const ConfusionMatrix& cm);

// Vargha-Delaney A: (#{x>y} + 0.5 #{x==y}) / (|x|*|y|) over all pairs.
double vargha_delaney_a12(std::span<const double> x, std::span<const double> y);

struct MetricSummary {
  double mean = 0;
  double median = 0;
};

// Arithmetic mean and median (midpoint of the central pair for even counts).
MetricSummary aggregate(std::span<const double> values);

}  // namespace mutlab
