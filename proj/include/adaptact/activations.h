#ifndef ADAPTACT_ACTIVATIONS_H_
#define ADAPTACT_ACTIVATIONS_H_

#include <string>
#include <string_view>

namespace adaptact {

// Parameterized activation families g(z; alpha). alpha = 1 recovers the
// usual fixed-shape function in each case.
enum class ActivationKind {
  kElu,       // z for z >= 0, alpha * (e^z - 1) otherwise
  kSoftplus,  // log(e^z + alpha^2)
  kSwish,     // z * sigmoid(alpha * z)
};

struct Partials {
  double d_dz = 0.0;
  double d_dalpha = 0.0;
};

struct ActivationEval {
  double value = 0.0;
  double d_dz = 0.0;
  double d_dalpha = 0.0;
};

// Logistic function, branch-selected so that exp() never overflows.
double Sigmoid(double t);

double Elu(double z, double alpha);
// The kink at z = 0 takes the right-hand branch: (1, 0).
Partials EluGrad(double z, double alpha);

// Overflow-safe log(e^z + alpha^2). With alpha = 0 this is exactly z.
double Softplus(double z, double alpha);
Partials SoftplusGrad(double z, double alpha);

double Swish(double z, double alpha);
Partials SwishGrad(double z, double alpha);

double Activate(ActivationKind kind, double z, double alpha);
Partials ActivateGrad(ActivationKind kind, double z, double alpha);
// Value and both partials in one call; shares the exp() between them.
ActivationEval Evaluate(ActivationKind kind, double z, double alpha);

std::string ToString(ActivationKind kind);
// Accepts "elu", "softplus", "swish" (case-insensitive). Throws
// std::invalid_argument on anything else.
ActivationKind ParseActivationKind(std::string_view name);

inline constexpr ActivationKind kAllActivations[] = {
    ActivationKind::kElu, ActivationKind::kSoftplus, ActivationKind::kSwish};

}  // namespace adaptact

#endif  // ADAPTACT_ACTIVATIONS_H_
