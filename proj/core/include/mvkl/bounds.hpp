#pragma once

#include "mvkl/common.hpp"

namespace mvkl {

/// Constant from the moment bound on Rademacher chaos.
inline constexpr double kEta0 = 23.0 / 22.0;

enum class BoundPart { A, B, C };

/// Inputs for the complexity bounds of the l_p-constrained dictionary class.
/// The exponent entering parts B and C is the Holder conjugate of p.
struct BoundInputs {
  double lambda_norm = 1.0;  // hypothesis-class radius
  double p = 1.0;            // dictionary norm exponent, in [1, infinity]
  Vector traces;             // tr of each kernel's vector-valued Gram matrix
  int sample_count = 1;
};

/// General dictionary bound with u_j = sqrt(traces_j):
///   A: lambda ||u||_1 / l
///   B: (lambda / l) sqrt(eta0 q) ||u||_q, integer conjugate q only
///   C: p = 1; min over r in {1 .. ceil(4 ln m)} of (lambda/l) sqrt(eta0 r)
///      ||u||_r.
double rademacher_bound_general(const BoundInputs& inputs, BoundPart part);

/// Separable-kernel bound with sup k_i(x, x) <= kappa and tr(L) <= tau:
///   A: lambda m sqrt(kappa tau / l)
///   B: lambda m^{1/q} sqrt(eta0 q kappa tau / l)
///   C: lambda sqrt(eta0 kappa tau / l) for m = 1,
///      lambda sqrt(eta0 e ceil(2 ln m) kappa tau / l) for m > 1.
double rademacher_bound_separable(double lambda_norm, int kernel_count,
                                  double p, double kappa, double tau,
                                  int sample_count, BoundPart part);

/// Holder conjugate q with 1/p + 1/q = 1; p = 1 maps to +infinity.
double holder_conjugate(double p);

}  // namespace mvkl
