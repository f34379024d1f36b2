#include "mvkl/bounds.hpp"

#include <cmath>
#include <limits>

namespace mvkl {

double holder_conjugate(double p) {
  check_input(p >= 1.0, "holder_conjugate: p must be >= 1");
  if (p == 1.0) return std::numeric_limits<double>::infinity();
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

namespace {

double lq_norm(const Vector& u, double q) {
  if (std::isinf(q)) return u.maxCoeff();
  double s = 0.0;
  for (Index j = 0; j < u.size(); ++j) s += std::pow(u[j], q);
  return std::pow(s, 1.0 / q);
}

double integer_conjugate(double p) {
  const double q = holder_conjugate(p);
  check_input(std::isfinite(q) && std::abs(q - std::round(q)) <= 1e-9,
              "rademacher bound part B requires an integer conjugate "
              "exponent (1/p + 1/q = 1, q natural)");
  return std::round(q);
}

}  // namespace

double rademacher_bound_general(const BoundInputs& inputs, BoundPart part) {
  check_input(inputs.lambda_norm >= 0.0,
              "rademacher_bound_general: negative class radius");
  check_input(inputs.sample_count >= 1,
              "rademacher_bound_general: sample count must be >= 1");
  const Index m = inputs.traces.size();
  check_input(m >= 1 && inputs.traces.minCoeff() >= 0.0,
              "rademacher_bound_general: invalid trace vector");
  const double l = inputs.sample_count;
  const Vector u = inputs.traces.array().sqrt().matrix();

  switch (part) {
    case BoundPart::A:
      return inputs.lambda_norm * u.sum() / l;
    case BoundPart::B: {
      const double q = integer_conjugate(inputs.p);
      return inputs.lambda_norm / l * std::sqrt(kEta0 * q) * lq_norm(u, q);
    }
    case BoundPart::C: {
      check_input(inputs.p == 1.0, "rademacher bound part C requires p = 1");
      const int r_max = std::max(
          1, static_cast<int>(std::ceil(4.0 * std::log(static_cast<double>(m)))));
      double best = std::numeric_limits<double>::infinity();
      for (int r = 1; r <= r_max; ++r) {
        const double value =
            inputs.lambda_norm / l * std::sqrt(kEta0 * r) * lq_norm(u, r);
        best = std::min(best, value);
      }
      return best;
    }
  }
  throw InvalidInputError("rademacher_bound_general: unknown part");
}

double rademacher_bound_separable(double lambda_norm, int kernel_count,
                                  double p, double kappa, double tau,
                                  int sample_count, BoundPart part) {
  check_input(lambda_norm >= 0.0 && kappa > 0.0 && tau > 0.0,
              "rademacher_bound_separable: invalid parameters");
  check_input(kernel_count >= 1 && sample_count >= 1,
              "rademacher_bound_separable: counts must be >= 1");
  const double m = kernel_count;
  const double l = sample_count;
  const double kt_over_l = kappa * tau / l;

  switch (part) {
    case BoundPart::A:
      return lambda_norm * m * std::sqrt(kt_over_l);
    case BoundPart::B: {
      const double q = integer_conjugate(p);
      return lambda_norm * std::pow(m, 1.0 / q) *
             std::sqrt(kEta0 * q * kt_over_l);
    }
    case BoundPart::C: {
      check_input(p == 1.0, "rademacher bound part C requires p = 1");
      if (kernel_count == 1)
        return lambda_norm * std::sqrt(kEta0 * kt_over_l);
      const double r = std::ceil(2.0 * std::log(m));
      const double e = 2.71828182845904523536;
      return lambda_norm * std::sqrt(kEta0 * e * r * kt_over_l);
    }
  }
  throw InvalidInputError("rademacher_bound_separable: unknown part");
}

}  // namespace mvkl
