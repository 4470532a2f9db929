#include "heavytail/quadrature.hpp"

namespace heavytail {

double integrate_adaptive_fn(const std::function<double(double)>& f, double a, double b,
                             const QuadratureSpec& spec) {
  return integrate_adaptive(f, a, b, spec);
}

}  // namespace heavytail
