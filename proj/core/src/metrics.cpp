#include "mutlab/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "mutlab/error.hpp"

namespace mutlab {

ConfusionMatrix confusion(const std::vector<bool>& truth, const std::vector<bool>& predicted) {
  if (truth.size() != predicted.size())
    throw Error("id_mismatch", "truth and prediction sets differ in size");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i]) {
      predicted[i] ? ++cm.tp : ++cm.fn;
    } else {
      predicted[i] ? ++cm.fp : ++cm.tn;
    }
  }
  return cm;
}

double precision(const ConfusionMatrix& cm) {
  long long denom = cm.tp + cm.fp;
  return denom == 0 ? 0.0 : static_cast<double>(cm.tp) / static_cast<double>(denom);
}

double recall(const ConfusionMatrix& cm) {
  long long denom = cm.tp + cm.fn;
  return denom == 0 ? 0.0 : static_cast<double>(cm.tp) / static_cast<double>(denom);
}

double f_measure(const ConfusionMatrix& cm) {
  double p = precision(cm);
  double r = recall(cm);
  return p + r == 0 ? 0.0 : 2 * p * r / (p + r);
}

double mcc(const ConfusionMatrix& cm) {
  double tp = static_cast<double>(cm.tp);
  double fp = static_cast<double>(cm.fp);
  double tn = static_cast<double>(cm.tn);
  double fn = static_cast<double>(cm.fn);
  double denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  if (denom == 0) return 0.0;
  return (tp * tn - fp * fn) / std::sqrt(denom);
}

double vargha_delaney_a12(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty())
    throw Error("empty_sample", "effect size needs two nonempty samples");
  double score = 0;
  for (double xv : x)
    for (double yv : y) {
      if (xv > yv)
        score += 1.0;
      else if (xv == yv)
        score += 0.5;
    }
  return score / (static_cast<double>(x.size()) * static_cast<double>(y.size()));
}

MetricSummary aggregate(std::span<const double> values) {
  if (values.empty()) throw Error("empty_sample", "nothing to aggregate");
  MetricSummary s;
  double sum = 0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::size_t n = sorted.size();
  s.median = n % 2 ? sorted[n / 2] : (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
  return s;
}

}  // namespace mutlab
