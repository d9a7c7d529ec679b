#include "adaptact/conformal.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace adaptact {

bool PredictionSet::contains(int label) const {
  return std::binary_search(members.begin(), members.end(), label);
}

double NonconformityScore(std::span<const double> probs, int true_label) {
  if (true_label < 0 || static_cast<std::size_t>(true_label) >= probs.size()) {
    throw std::invalid_argument("label " + std::to_string(true_label) +
                                " out of range for " +
                                std::to_string(probs.size()) + " classes");
  }
  return 1.0 - probs[true_label];
}

std::size_t ConformalRank(std::size_t n, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("delta must lie in (0, 1)");
  }
  // Nudge down before the ceiling so that products such as 0.9 * 20, which
  // land a hair above 18 in binary, still give 18.
  const double level = (1.0 - delta) * static_cast<double>(n + 1);
  return static_cast<std::size_t>(std::ceil(level - 1e-9));
}

double ConformalQuantile(std::span<const double> scores, double delta) {
  if (scores.empty()) throw std::invalid_argument("no calibration scores");
  const std::size_t k = ConformalRank(scores.size(), delta);
  if (k > scores.size()) return 1.0;
  std::vector<double> sorted(scores.begin(), scores.end());
  const auto kth = sorted.begin() + static_cast<std::ptrdiff_t>(k - 1);
  std::nth_element(sorted.begin(), kth, sorted.end());
  return *kth;
}

PredictionSet MakePredictionSet(std::span<const double> probs, double q_hat) {
  const double threshold = 1.0 - q_hat;
  PredictionSet set;
  for (std::size_t y = 0; y < probs.size(); ++y) {
    if (probs[y] >= threshold) set.members.push_back(static_cast<int>(y));
  }
  return set;
}

double EmpiricalCoverage(std::span<const PredictionSet> sets,
                         std::span<const int> labels) {
  if (sets.size() != labels.size()) {
    throw std::invalid_argument("coverage: " + std::to_string(sets.size()) +
                                " sets but " + std::to_string(labels.size()) +
                                " labels");
  }
  if (sets.empty()) throw std::invalid_argument("coverage: no sets");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (sets[i].contains(labels[i])) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(sets.size());
}

double UncertaintyScore(std::span<const PredictionSet> sets) {
  if (sets.empty()) throw std::invalid_argument("uncertainty score: no sets");
  std::size_t total = 0;
  for (const PredictionSet& s : sets) total += s.size();
  return static_cast<double>(total) / static_cast<double>(sets.size());
}

ConformalCalibration Calibrate(const Network& net, const BatchView& cal_set,
                               double delta) {
  if (cal_set.size() == 0) throw std::invalid_argument("empty calibration set");
  std::vector<double> scores;
  scores.reserve(cal_set.size());
  for (std::size_t n = 0; n < cal_set.size(); ++n) {
    scores.push_back(
        NonconformityScore(Forward(net, cal_set.row(n)), cal_set.labels[n]));
  }
  return {ConformalQuantile(scores, delta), delta, scores.size()};
}

ConformalEvaluation CalibrateAndEvaluate(const Network& net,
                                         const BatchView& cal_set,
                                         const BatchView& test_set,
                                         double delta) {
  if (test_set.size() == 0) throw std::invalid_argument("empty test set");
  ConformalEvaluation eval;
  eval.calibration = Calibrate(net, cal_set, delta);
  eval.sets.reserve(test_set.size());
  for (std::size_t n = 0; n < test_set.size(); ++n) {
    eval.sets.push_back(
        MakePredictionSet(Forward(net, test_set.row(n)), eval.calibration.q_hat));
  }
  eval.coverage = EmpiricalCoverage(eval.sets, test_set.labels);
  eval.avg_set_size = UncertaintyScore(eval.sets);
  return eval;
}

}  // namespace adaptact
