#pragma once

#include <vector>

namespace perifract {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

// Gauss-Legendre rule of the given order (Newton iteration on P_n).
GaussRule gauss_legendre(int order);

// Integrate f over [lo, hi] with a fixed-order Gauss-Legendre rule.
template <class F>
double integrate(const GaussRule& rule, double lo, double hi, F&& f) {
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  double sum = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    sum += rule.weights[k] * f(mid + half * rule.nodes[k]);
  }
  return half * sum;
}

}  // namespace perifract
