#ifndef ADAPTACT_NETWORK_H_
#define ADAPTACT_NETWORK_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adaptact/activations.h"

namespace adaptact {

// How the hidden layer's activation shape parameters are trained.
//   kFixed      (M1): alpha pinned at 1, nothing trainable.
//   kShared     (M2): one alpha shared by every hidden unit.
//   kIndividual (M3): one alpha per hidden unit.
enum class AlphaMode { kFixed, kShared, kIndividual };

std::string ToString(AlphaMode mode);
// Accepts "m1"/"fixed", "m2"/"shared", "m3"/"individual".
AlphaMode ParseAlphaMode(std::string_view name);

inline constexpr AlphaMode kAllModes[] = {AlphaMode::kFixed, AlphaMode::kShared,
                                          AlphaMode::kIndividual};

struct NetworkSpec {
  std::size_t input_dim = 1;
  std::size_t hidden_units = 2;
  std::size_t num_classes = 2;
  ActivationKind activation = ActivationKind::kElu;
  AlphaMode mode = AlphaMode::kFixed;

  // Throws std::invalid_argument unless input_dim >= 1, hidden_units >= 1
  // and num_classes >= 2.
  void Validate() const;
  // 0, 1 or hidden_units depending on mode.
  std::size_t AlphaCount() const;

  bool operator==(const NetworkSpec&) const = default;
};

// Number of trainable scalars: N_h(D+1) + C(N_h+1) + AlphaCount().
std::size_t ParamCount(const NetworkSpec& spec);

// Trainable tensors of a one-hidden-layer MLP. Matrices are row-major.
// Also used to hold gradients, which share the layout exactly.
struct Parameters {
  std::vector<double> w1;      // hidden_units x input_dim
  std::vector<double> b1;      // hidden_units
  std::vector<double> w2;      // num_classes x hidden_units
  std::vector<double> b2;      // num_classes
  std::vector<double> alphas;  // AlphaCount() entries

  // Zero-filled tensors shaped for `spec`.
  static Parameters Zeros(const NetworkSpec& spec);

  std::size_t size() const;
  // Concatenation w1 | b1 | w2 | b2 | alphas.
  std::vector<double> Flatten() const;
  // Inverse of Flatten(); `flat` must have exactly size() entries.
  void Unflatten(std::span<const double> flat);

  bool operator==(const Parameters&) const = default;
};

using Gradients = Parameters;

// Row-major feature matrix plus labels; does not own its storage.
struct BatchView {
  std::span<const double> features;
  std::span<const int> labels;
  std::size_t dim = 0;

  std::size_t size() const { return labels.size(); }
  std::span<const double> row(std::size_t i) const {
    return features.subspan(i * dim, dim);
  }
};

class Network {
 public:
  // All weights and biases zero, alphas one.
  explicit Network(const NetworkSpec& spec);
  Network(const NetworkSpec& spec, Parameters params);

  const NetworkSpec& spec() const { return spec_; }
  const Parameters& params() const { return params_; }
  Parameters& params() { return params_; }

  // Shape parameter used by hidden unit `unit` after resolving the mode.
  double alpha(std::size_t unit) const;

  bool operator==(const Network&) const = default;

 private:
  NetworkSpec spec_;
  Parameters params_;
};

// Glorot-uniform weights from a generator seeded with `seed`, zero biases
// and every alpha set to 1. Deterministic in (spec, seed).
Network InitNetwork(const NetworkSpec& spec, std::uint64_t seed);

// Output-layer pre-softmax scores.
std::vector<double> Logits(const Network& net, std::span<const double> x);
// Softmax class probabilities. Throws std::invalid_argument when x does not
// have input_dim entries.
std::vector<double> Forward(const Network& net, std::span<const double> x);
// argmax of Forward(); ties go to the lowest class index.
int Predict(const Network& net, std::span<const double> x);

// Max-subtracted softmax.
std::vector<double> Softmax(std::span<const double> logits);
// Index of the largest entry, lowest index on ties.
int ArgMax(std::span<const double> values);

inline constexpr double kProbabilityFloor = 1e-12;

// Mean cross-entropy over the batch; each probability is clamped below at
// kProbabilityFloor before the log. Throws on out-of-range labels.
double Loss(const Network& net, const BatchView& batch);

struct LossAndGradients {
  double loss = 0.0;
  Gradients grads;
};

// Exact gradient of Loss() with respect to every trainable parameter. In
// shared mode the single alpha gradient is the sum over hidden units.
LossAndGradients Backward(const Network& net, const BatchView& batch);

}  // namespace adaptact

#endif  // ADAPTACT_NETWORK_H_
