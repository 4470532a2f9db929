#pragma once

#include <functional>
#include <vector>

namespace heavytail {

struct NelderMeadOptions {
  double tol = 1e-8;          // simplex diameter threshold
  int max_iter = 4000;        // iterations (one reflect/expand/contract/shrink step each)
  double initial_step = 0.1;  // per-coordinate displacement of the initial simplex
};

struct NelderMeadResult {
  std::vector<double> x;
  double fx = 0.0;
  bool converged = false;
  int iterations = 0;
  int evaluations = 0;
};

/// Derivative-free simplex minimization (Nelder-Mead, standard coefficients).
/// Terminates when the simplex diameter drops below tol or max_iter is hit;
/// the converged flag reports which. Objective values that come back non-finite
/// during the search are treated as +infinity. Throws std::invalid_argument if
/// the objective is non-finite at the start point.
NelderMeadResult nelder_mead_minimize(const std::function<double(const std::vector<double>&)>& objective,
                                      std::vector<double> start, const NelderMeadOptions& opts = {});

}  // namespace heavytail
