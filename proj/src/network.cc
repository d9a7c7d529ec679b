#include "adaptact/network.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>
#include <stdexcept>
#include <utility>

namespace adaptact {

std::string ToString(AlphaMode mode) {
  switch (mode) {
    case AlphaMode::kFixed:
      return "m1";
    case AlphaMode::kShared:
      return "m2";
    case AlphaMode::kIndividual:
      return "m3";
  }
  return "unknown";
}

AlphaMode ParseAlphaMode(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "m1" || lower == "fixed") return AlphaMode::kFixed;
  if (lower == "m2" || lower == "shared") return AlphaMode::kShared;
  if (lower == "m3" || lower == "individual") return AlphaMode::kIndividual;
  throw std::invalid_argument("unknown mode '" + std::string(name) +
                              "' (expected m1, m2 or m3)");
}

void NetworkSpec::Validate() const {
  if (input_dim < 1) throw std::invalid_argument("input_dim must be >= 1");
  if (hidden_units < 1) {
    throw std::invalid_argument("hidden_units must be >= 1");
  }
  if (num_classes < 2) throw std::invalid_argument("num_classes must be >= 2");
}

std::size_t NetworkSpec::AlphaCount() const {
  switch (mode) {
    case AlphaMode::kFixed:
      return 0;
    case AlphaMode::kShared:
      return 1;
    case AlphaMode::kIndividual:
      return hidden_units;
  }
  return 0;
}

std::size_t ParamCount(const NetworkSpec& spec) {
  return spec.hidden_units * (spec.input_dim + 1) +
         spec.num_classes * (spec.hidden_units + 1) + spec.AlphaCount();
}

Parameters Parameters::Zeros(const NetworkSpec& spec) {
  Parameters p;
  p.w1.assign(spec.hidden_units * spec.input_dim, 0.0);
  p.b1.assign(spec.hidden_units, 0.0);
  p.w2.assign(spec.num_classes * spec.hidden_units, 0.0);
  p.b2.assign(spec.num_classes, 0.0);
  p.alphas.assign(spec.AlphaCount(), 0.0);
  return p;
}

std::size_t Parameters::size() const {
  return w1.size() + b1.size() + w2.size() + b2.size() + alphas.size();
}

std::vector<double> Parameters::Flatten() const {
  std::vector<double> flat;
  flat.reserve(size());
  for (const auto* part : {&w1, &b1, &w2, &b2, &alphas}) {
    flat.insert(flat.end(), part->begin(), part->end());
  }
  return flat;
}

void Parameters::Unflatten(std::span<const double> flat) {
  if (flat.size() != size()) {
    throw std::invalid_argument("flat parameter vector has " +
                                std::to_string(flat.size()) +
                                " entries, expected " + std::to_string(size()));
  }
  auto it = flat.begin();
  for (auto* part : {&w1, &b1, &w2, &b2, &alphas}) {
    std::copy_n(it, part->size(), part->begin());
    it += static_cast<std::ptrdiff_t>(part->size());
  }
}

Network::Network(const NetworkSpec& spec)
    : spec_(spec), params_(Parameters::Zeros(spec)) {
  spec_.Validate();
  std::fill(params_.alphas.begin(), params_.alphas.end(), 1.0);
}

Network::Network(const NetworkSpec& spec, Parameters params)
    : spec_(spec), params_(std::move(params)) {
  spec_.Validate();
  const Parameters shape = Parameters::Zeros(spec_);
  if (params_.w1.size() != shape.w1.size() ||
      params_.b1.size() != shape.b1.size() ||
      params_.w2.size() != shape.w2.size() ||
      params_.b2.size() != shape.b2.size() ||
      params_.alphas.size() != shape.alphas.size()) {
    throw std::invalid_argument("parameter shapes do not match network spec");
  }
}

double Network::alpha(std::size_t unit) const {
  switch (spec_.mode) {
    case AlphaMode::kFixed:
      return 1.0;
    case AlphaMode::kShared:
      return params_.alphas[0];
    case AlphaMode::kIndividual:
      return params_.alphas[unit];
  }
  return 1.0;
}

Network InitNetwork(const NetworkSpec& spec, std::uint64_t seed) {
  Network net(spec);
  std::mt19937_64 rng(seed);
  auto glorot = [&rng](std::vector<double>& w, std::size_t fan_in,
                       std::size_t fan_out) {
    const double limit =
        std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (double& v : w) v = dist(rng);
  };
  glorot(net.params().w1, spec.input_dim, spec.hidden_units);
  glorot(net.params().w2, spec.hidden_units, spec.num_classes);
  return net;
}

namespace {

void CheckInput(const Network& net, std::span<const double> x) {
  if (x.size() != net.spec().input_dim) {
    throw std::invalid_argument("input has " + std::to_string(x.size()) +
                                " features, network expects " +
                                std::to_string(net.spec().input_dim));
  }
}

void CheckLabel(const Network& net, int label) {
  if (label < 0 || static_cast<std::size_t>(label) >= net.spec().num_classes) {
    throw std::invalid_argument("label " + std::to_string(label) +
                                " out of range for " +
                                std::to_string(net.spec().num_classes) +
                                " classes");
  }
}

void CheckBatch(const Network& net, const BatchView& batch) {
  if (batch.dim != net.spec().input_dim) {
    throw std::invalid_argument("batch dimension does not match network");
  }
  if (batch.features.size() != batch.size() * batch.dim) {
    throw std::invalid_argument("batch feature matrix has wrong size");
  }
  if (batch.size() == 0) throw std::invalid_argument("empty batch");
  for (int label : batch.labels) CheckLabel(net, label);
}

// Per-sample intermediate values kept for backpropagation.
struct HiddenState {
  std::vector<double> act;       // g(z; alpha)
  std::vector<double> d_dz;      // dg/dz
  std::vector<double> d_dalpha;  // dg/dalpha
};

HiddenState Hidden(const Network& net, std::span<const double> x) {
  const NetworkSpec& spec = net.spec();
  const Parameters& p = net.params();
  HiddenState h;
  h.act.resize(spec.hidden_units);
  h.d_dz.resize(spec.hidden_units);
  h.d_dalpha.resize(spec.hidden_units);
  for (std::size_t i = 0; i < spec.hidden_units; ++i) {
    double z = p.b1[i];
    for (std::size_t j = 0; j < spec.input_dim; ++j) {
      z += p.w1[i * spec.input_dim + j] * x[j];
    }
    const ActivationEval e = Evaluate(spec.activation, z, net.alpha(i));
    h.act[i] = e.value;
    h.d_dz[i] = e.d_dz;
    h.d_dalpha[i] = e.d_dalpha;
  }
  return h;
}

std::vector<double> OutputLogits(const Network& net,
                                 std::span<const double> hidden) {
  const NetworkSpec& spec = net.spec();
  const Parameters& p = net.params();
  std::vector<double> logits(spec.num_classes);
  for (std::size_t c = 0; c < spec.num_classes; ++c) {
    double s = p.b2[c];
    for (std::size_t i = 0; i < spec.hidden_units; ++i) {
      s += p.w2[c * spec.hidden_units + i] * hidden[i];
    }
    logits[c] = s;
  }
  return logits;
}

}  // namespace

std::vector<double> Softmax(std::span<const double> logits) {
  const double m = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double denom = 0.0;
  for (std::size_t c = 0; c < logits.size(); ++c) {
    out[c] = std::exp(logits[c] - m);
    denom += out[c];
  }
  for (double& v : out) v /= denom;
  return out;
}

int ArgMax(std::span<const double> values) {
  // max_element returns the first maximal element.
  return static_cast<int>(std::max_element(values.begin(), values.end()) -
                          values.begin());
}

std::vector<double> Logits(const Network& net, std::span<const double> x) {
  CheckInput(net, x);
  return OutputLogits(net, Hidden(net, x).act);
}

std::vector<double> Forward(const Network& net, std::span<const double> x) {
  return Softmax(Logits(net, x));
}

int Predict(const Network& net, std::span<const double> x) {
  return ArgMax(Forward(net, x));
}

double Loss(const Network& net, const BatchView& batch) {
  CheckBatch(net, batch);
  double total = 0.0;
  for (std::size_t n = 0; n < batch.size(); ++n) {
    const std::vector<double> probs = Forward(net, batch.row(n));
    total -= std::log(std::max(probs[batch.labels[n]], kProbabilityFloor));
  }
  return total / static_cast<double>(batch.size());
}

LossAndGradients Backward(const Network& net, const BatchView& batch) {
  CheckBatch(net, batch);
  const NetworkSpec& spec = net.spec();
  const Parameters& p = net.params();
  const std::size_t dim = spec.input_dim;
  const std::size_t units = spec.hidden_units;
  const std::size_t classes = spec.num_classes;
  const double inv_n = 1.0 / static_cast<double>(batch.size());

  LossAndGradients out{0.0, Parameters::Zeros(spec)};
  Gradients& g = out.grads;
  std::vector<double> d_hidden(units);

  for (std::size_t n = 0; n < batch.size(); ++n) {
    const std::span<const double> x = batch.row(n);
    const int label = batch.labels[n];
    const HiddenState h = Hidden(net, x);
    std::vector<double> d_logits = Softmax(OutputLogits(net, h.act));
    out.loss -= std::log(std::max(d_logits[label], kProbabilityFloor));

    // d(-log softmax_y)/d logits = p - onehot(y), scaled for the batch mean.
    d_logits[label] -= 1.0;
    for (double& v : d_logits) v *= inv_n;

    std::fill(d_hidden.begin(), d_hidden.end(), 0.0);
    for (std::size_t c = 0; c < classes; ++c) {
      g.b2[c] += d_logits[c];
      for (std::size_t i = 0; i < units; ++i) {
        g.w2[c * units + i] += d_logits[c] * h.act[i];
        d_hidden[i] += p.w2[c * units + i] * d_logits[c];
      }
    }

    for (std::size_t i = 0; i < units; ++i) {
      const double dz = d_hidden[i] * h.d_dz[i];
      g.b1[i] += dz;
      for (std::size_t j = 0; j < dim; ++j) g.w1[i * dim + j] += dz * x[j];

      const double d_alpha = d_hidden[i] * h.d_dalpha[i];
      switch (spec.mode) {
        case AlphaMode::kFixed:
          break;
        case AlphaMode::kShared:
          g.alphas[0] += d_alpha;
          break;
        case AlphaMode::kIndividual:
          g.alphas[i] += d_alpha;
          break;
      }
    }
  }
  out.loss *= inv_n;
  return out;
}

}  // namespace adaptact
