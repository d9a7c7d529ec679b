#ifndef ADAPTACT_TESTS_TEST_UTIL_H_
#define ADAPTACT_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "adaptact/network.h"

namespace adaptact::testing {

// (f(x + h) - f(x - h)) / 2h
template <typename F>
double CentralDifference(F&& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Relative agreement, falling back to an absolute bound near zero.
inline bool GradientsAgree(double analytic, double numeric, double rel,
                           double abs) {
  const double diff = std::fabs(analytic - numeric);
  return diff <= abs || diff <= rel * std::max(std::fabs(analytic),
                                               std::fabs(numeric));
}

// Random network with every parameter (alphas included) drawn uniformly.
inline Network RandomNetwork(const NetworkSpec& spec, std::mt19937_64& rng,
                             double weight_range = 1.5) {
  std::uniform_real_distribution<double> w(-weight_range, weight_range);
  std::uniform_real_distribution<double> a(0.25, 2.0);
  Parameters p = Parameters::Zeros(spec);
  for (auto* part : {&p.w1, &p.b1, &p.w2, &p.b2}) {
    for (double& v : *part) v = w(rng);
  }
  for (double& v : p.alphas) v = a(rng);
  return Network(spec, std::move(p));
}

struct OwnedBatch {
  std::vector<double> features;
  std::vector<int> labels;
  std::size_t dim = 0;
  BatchView view() const { return {features, labels, dim}; }
};

inline OwnedBatch RandomBatch(std::size_t n, std::size_t dim,
                              std::size_t classes, std::mt19937_64& rng) {
  std::normal_distribution<double> x(0.0, 1.0);
  std::uniform_int_distribution<int> y(0, static_cast<int>(classes) - 1);
  OwnedBatch b;
  b.dim = dim;
  for (std::size_t i = 0; i < n * dim; ++i) b.features.push_back(x(rng));
  for (std::size_t i = 0; i < n; ++i) b.labels.push_back(y(rng));
  return b;
}

// Hidden pre-activations recomputed from the raw parameters, independent of
// the library's forward pass.
inline std::vector<double> PreActivations(const Network& net,
                                          const OwnedBatch& batch) {
  const auto& p = net.params();
  const std::size_t units = net.spec().hidden_units;
  std::vector<double> z;
  for (std::size_t n = 0; n < batch.labels.size(); ++n) {
    for (std::size_t i = 0; i < units; ++i) {
      double s = p.b1[i];
      for (std::size_t j = 0; j < batch.dim; ++j) {
        s += p.w1[i * batch.dim + j] * batch.features[n * batch.dim + j];
      }
      z.push_back(s);
    }
  }
  return z;
}

}  // namespace adaptact::testing

#endif  // ADAPTACT_TESTS_TEST_UTIL_H_
