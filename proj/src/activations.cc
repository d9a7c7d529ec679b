#include "adaptact/activations.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace adaptact {

namespace {

// 2 * log|alpha|; -inf when alpha == 0.
double LogAlphaSquared(double alpha) {
  if (alpha == 0.0) return -std::numeric_limits<double>::infinity();
  return 2.0 * std::log(std::fabs(alpha));
}

}  // namespace

double Sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double Elu(double z, double alpha) {
  if (z >= 0.0) return z;
  return alpha * std::expm1(z);
}

Partials EluGrad(double z, double alpha) {
  if (z >= 0.0) return {1.0, 0.0};
  return {alpha * std::exp(z), std::expm1(z)};
}

double Softplus(double z, double alpha) {
  if (alpha == 0.0) return z;
  // log-sum-exp of {z, log(alpha^2)}.
  const double la = LogAlphaSquared(alpha);
  if (z >= la) return z + std::log1p(std::exp(la - z));
  return la + std::log1p(std::exp(z - la));
}

Partials SoftplusGrad(double z, double alpha) {
  if (alpha == 0.0) return {1.0, 0.0};
  const double la = LogAlphaSquared(alpha);
  // e^z / (e^z + a^2) = sigmoid(z - log a^2)
  // 2a / (e^z + a^2)  = (2 / a) * sigmoid(log a^2 - z)
  return {Sigmoid(z - la), (2.0 / alpha) * Sigmoid(la - z)};
}

double Swish(double z, double alpha) { return z * Sigmoid(alpha * z); }

Partials SwishGrad(double z, double alpha) {
  const double t = alpha * z;
  const double s = Sigmoid(t);
  // 1 - sigmoid(t) evaluated as sigmoid(-t) to keep precision in the tails.
  const double s_neg = Sigmoid(-t);
  return {(1.0 + t) * s - t * s * s, z * z * s * s_neg};
}

double Activate(ActivationKind kind, double z, double alpha) {
  switch (kind) {
    case ActivationKind::kElu:
      return Elu(z, alpha);
    case ActivationKind::kSoftplus:
      return Softplus(z, alpha);
    case ActivationKind::kSwish:
      return Swish(z, alpha);
  }
  throw std::invalid_argument("unknown activation kind");
}

Partials ActivateGrad(ActivationKind kind, double z, double alpha) {
  switch (kind) {
    case ActivationKind::kElu:
      return EluGrad(z, alpha);
    case ActivationKind::kSoftplus:
      return SoftplusGrad(z, alpha);
    case ActivationKind::kSwish:
      return SwishGrad(z, alpha);
  }
  throw std::invalid_argument("unknown activation kind");
}

ActivationEval Evaluate(ActivationKind kind, double z, double alpha) {
  switch (kind) {
    case ActivationKind::kElu: {
      if (z >= 0.0) return {z, 1.0, 0.0};
      const double em1 = std::expm1(z);
      return {alpha * em1, alpha * std::exp(z), em1};
    }
    case ActivationKind::kSoftplus: {
      const Partials p = SoftplusGrad(z, alpha);
      return {Softplus(z, alpha), p.d_dz, p.d_dalpha};
    }
    case ActivationKind::kSwish: {
      const double t = alpha * z;
      const double s = Sigmoid(t);
      const double s_neg = Sigmoid(-t);
      return {z * s, (1.0 + t) * s - t * s * s, z * z * s * s_neg};
    }
  }
  throw std::invalid_argument("unknown activation kind");
}

std::string ToString(ActivationKind kind) {
  switch (kind) {
    case ActivationKind::kElu:
      return "elu";
    case ActivationKind::kSoftplus:
      return "softplus";
    case ActivationKind::kSwish:
      return "swish";
  }
  return "unknown";
}

ActivationKind ParseActivationKind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "elu") return ActivationKind::kElu;
  if (lower == "softplus") return ActivationKind::kSoftplus;
  if (lower == "swish") return ActivationKind::kSwish;
  throw std::invalid_argument("unknown activation '" + std::string(name) +
                              "' (expected elu, softplus or swish)");
}

}  // namespace adaptact
