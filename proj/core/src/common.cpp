#include "mvkl/common.hpp"

#include <cmath>

namespace mvkl {

double largest_eigenvalue(const std::function<Vector(const Vector&)>& apply,
                          Index dim, double rel_tol, int max_iter,
                          std::uint64_t seed,
                          const std::function<double()>& exact_fallback) {
  check_input(dim >= 1, "largest_eigenvalue: empty operator");
  if (dim == 1) {
    Vector e = Vector::Ones(1);
    return apply(e)[0];
  }
  Rng rng(seed);
  Vector v = rng.normal_vector(dim);
  v.normalize();
  double theta = 0.0;
  double theta_prev = -1.0;
  for (int it = 0; it < max_iter; ++it) {
    Vector w = apply(v);
    theta = v.dot(w);
    const double wn = w.norm();
    if (wn <= 1e-300) return 0.0;  // operator annihilates the iterate
    v = w / wn;
    if (it > 0 && std::abs(theta - theta_prev) <=
                      rel_tol * std::max(1e-30, std::abs(theta))) {
      return theta;
    }
    theta_prev = theta;
  }
  if (exact_fallback) return exact_fallback();
  return theta;
}

}  // namespace mvkl
