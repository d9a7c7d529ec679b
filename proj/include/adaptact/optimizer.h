#ifndef ADAPTACT_OPTIMIZER_H_
#define ADAPTACT_OPTIMIZER_H_

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "adaptact/network.h"

namespace adaptact {

struct AdamState {
  std::size_t step = 0;
  std::vector<double> m;  // first moment, flattened parameter layout
  std::vector<double> v;  // second moment
  double learning_rate = 0.05;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  // Zero moments sized for `net`'s trainable parameters.
  static AdamState For(const Network& net, double learning_rate);
};

// One bias-corrected Adam update applied to every trainable parameter,
// alphas included. Throws std::invalid_argument on layout mismatch.
void AdamStep(AdamState& state, Network& net, const Gradients& grads);

struct TrainConfig {
  std::size_t epochs = 100;
  double learning_rate = 0.05;
};

struct TrainResult {
  Network network;
  // Full-batch loss at the start of each epoch; exactly `epochs` entries.
  std::vector<double> loss_history;
};

// Raised when the loss stops being finite; carries the failing epoch.
class TrainingError : public std::runtime_error {
 public:
  TrainingError(std::size_t epoch, const std::string& what)
      : std::runtime_error(what), epoch_(epoch) {}
  std::size_t epoch() const { return epoch_; }

 private:
  std::size_t epoch_;
};

// Full-batch Adam from InitNetwork(spec, seed). Deterministic in all
// arguments.
TrainResult Train(const NetworkSpec& spec, const BatchView& data,
                  const TrainConfig& config, std::uint64_t seed);

}  // namespace adaptact

#endif  // ADAPTACT_OPTIMIZER_H_
