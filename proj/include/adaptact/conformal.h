#ifndef ADAPTACT_CONFORMAL_H_
#define ADAPTACT_CONFORMAL_H_

#include <cstddef>
#include <span>
#include <vector>

#include "adaptact/network.h"

namespace adaptact {

inline constexpr double kDefaultDelta = 0.1;

// Class indices in ascending order. May be empty.
struct PredictionSet {
  std::vector<int> members;

  bool contains(int label) const;
  std::size_t size() const { return members.size(); }
  bool operator==(const PredictionSet&) const = default;
};

struct ConformalCalibration {
  double q_hat = 1.0;
  double delta = kDefaultDelta;
  std::size_t n_cal = 0;
};

// 1 - probs[true_label].
double NonconformityScore(std::span<const double> probs, int true_label);

// ceil((1 - delta)(N + 1))-th smallest score (1-based, duplicates kept), or
// 1.0 when that rank exceeds N. Throws on empty scores or delta outside
// (0, 1).
double ConformalQuantile(std::span<const double> scores, double delta);

// Rank k = ceil((1 - delta)(N + 1)) used by ConformalQuantile.
std::size_t ConformalRank(std::size_t n, double delta);

// { y : probs[y] >= 1 - q_hat }.
PredictionSet MakePredictionSet(std::span<const double> probs, double q_hat);

// Fraction of points whose label falls inside its set. Empty sets count as
// misses.
double EmpiricalCoverage(std::span<const PredictionSet> sets,
                         std::span<const int> labels);

// Mean set cardinality.
double UncertaintyScore(std::span<const PredictionSet> sets);

struct ConformalEvaluation {
  ConformalCalibration calibration;
  double coverage = 0.0;
  double avg_set_size = 0.0;
  std::vector<PredictionSet> sets;
};

ConformalCalibration Calibrate(const Network& net, const BatchView& cal_set,
                               double delta);

// Scores the calibration batch, takes the conformal quantile and builds a
// prediction set for every test point.
ConformalEvaluation CalibrateAndEvaluate(const Network& net,
                                         const BatchView& cal_set,
                                         const BatchView& test_set,
                                         double delta = kDefaultDelta);

}  // namespace adaptact

#endif  // ADAPTACT_CONFORMAL_H_
