#include "adaptact/optimizer.h"

#include <cmath>
#include <stdexcept>

namespace adaptact {

AdamState AdamState::For(const Network& net, double learning_rate) {
  if (!(learning_rate > 0.0)) {
    throw std::invalid_argument("learning rate must be positive");
  }
  AdamState state;
  state.learning_rate = learning_rate;
  state.m.assign(net.params().size(), 0.0);
  state.v.assign(net.params().size(), 0.0);
  return state;
}

void AdamStep(AdamState& state, Network& net, const Gradients& grads) {
  const std::vector<double> g = grads.Flatten();
  std::vector<double> theta = net.params().Flatten();
  if (g.size() != theta.size() || state.m.size() != theta.size() ||
      state.v.size() != theta.size()) {
    throw std::invalid_argument("Adam state, gradients and parameters differ "
                                "in size");
  }
  const Parameters shape = Parameters::Zeros(net.spec());
  if (grads.w1.size() != shape.w1.size() ||
      grads.alphas.size() != shape.alphas.size()) {
    throw std::invalid_argument("gradient layout does not match network");
  }

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(state.beta1, t);
  const double correction2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t k = 0; k < theta.size(); ++k) {
    state.m[k] = state.beta1 * state.m[k] + (1.0 - state.beta1) * g[k];
    state.v[k] = state.beta2 * state.v[k] + (1.0 - state.beta2) * g[k] * g[k];
    const double m_hat = state.m[k] / correction1;
    const double v_hat = state.v[k] / correction2;
    theta[k] -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
  }
  net.params().Unflatten(theta);
}

TrainResult Train(const NetworkSpec& spec, const BatchView& data,
                  const TrainConfig& config, std::uint64_t seed) {
  if (data.size() == 0) throw std::invalid_argument("empty training set");
  TrainResult result{InitNetwork(spec, seed), {}};
  result.loss_history.reserve(config.epochs);
  AdamState state = AdamState::For(result.network, config.learning_rate);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    LossAndGradients lg = Backward(result.network, data);
    if (!std::isfinite(lg.loss)) {
      throw TrainingError(epoch, "non-finite training loss at epoch " +
                                     std::to_string(epoch));
    }
    result.loss_history.push_back(lg.loss);
    AdamStep(state, result.network, lg.grads);
  }
  return result;
}

}  // namespace adaptact
