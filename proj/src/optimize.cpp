#include "heavytail/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace heavytail {

namespace {

double simplex_diameter(const std::vector<std::vector<double>>& verts) {
  double diam = 0.0;
  for (std::size_t i = 1; i < verts.size(); ++i) {
    double d2 = 0.0;
    for (std::size_t j = 0; j < verts[0].size(); ++j) {
      const double d = verts[i][j] - verts[0][j];
      d2 += d * d;
    }
    diam = std::max(diam, std::sqrt(d2));
  }
  return diam;
}

}  // namespace

NelderMeadResult nelder_mead_minimize(const std::function<double(const std::vector<double>&)>& objective,
                                      std::vector<double> start, const NelderMeadOptions& opts) {
  const std::size_t n = start.size();
  if (n == 0) throw std::invalid_argument("nelder_mead_minimize: empty start vector");

  int evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    const double f = objective(x);
    return std::isfinite(f) ? f : std::numeric_limits<double>::infinity();
  };

  const double f0 = objective(start);
  ++evals;
  if (!std::isfinite(f0)) {
    throw std::invalid_argument("nelder_mead_minimize: objective non-finite at start");
  }

  std::vector<std::vector<double>> verts(n + 1, start);
  std::vector<double> fvals(n + 1);
  fvals[0] = f0;
  for (std::size_t i = 0; i < n; ++i) {
    double step = opts.initial_step * std::max(1.0, std::abs(start[i]));
    verts[i + 1][i] += step;
    fvals[i + 1] = eval(verts[i + 1]);
  }

  std::vector<std::size_t> order(n + 1);
  NelderMeadResult result;
  int iter = 0;
  for (; iter < opts.max_iter; ++iter) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fvals[a] < fvals[b]; });
    std::vector<std::vector<double>> sorted_v(n + 1);
    std::vector<double> sorted_f(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      sorted_v[i] = verts[order[i]];
      sorted_f[i] = fvals[order[i]];
    }
    verts.swap(sorted_v);
    fvals.swap(sorted_f);

    if (simplex_diameter(verts) < opts.tol) {
      result.converged = true;
      break;
    }

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) centroid[j] += verts[i][j];
    }
    for (double& c : centroid) c /= static_cast<double>(n);

    auto blend = [&](double coeff) {
      std::vector<double> p(n);
      for (std::size_t j = 0; j < n; ++j) p[j] = centroid[j] + coeff * (verts[n][j] - centroid[j]);
      return p;
    };

    const std::vector<double> reflected = blend(-1.0);
    const double fr = eval(reflected);
    if (fr < fvals[0]) {
      const std::vector<double> expanded = blend(-2.0);
      const double fe = eval(expanded);
      if (fe < fr) {
        verts[n] = expanded;
        fvals[n] = fe;
      } else {
        verts[n] = reflected;
        fvals[n] = fr;
      }
      continue;
    }
    if (fr < fvals[n - 1]) {
      verts[n] = reflected;
      fvals[n] = fr;
      continue;
    }
    const std::vector<double> contracted = blend(fr < fvals[n] ? -0.5 : 0.5);
    const double fc = eval(contracted);
    if (fc < std::min(fr, fvals[n])) {
      verts[n] = contracted;
      fvals[n] = fc;
      continue;
    }
    // shrink toward the best vertex
    for (std::size_t i = 1; i <= n; ++i) {
      for (std::size_t j = 0; j < n; ++j) verts[i][j] = verts[0][j] + 0.5 * (verts[i][j] - verts[0][j]);
      fvals[i] = eval(verts[i]);
    }
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    if (fvals[i] < fvals[best]) best = i;
  }
  result.x = verts[best];
  result.fx = fvals[best];
  result.iterations = iter;
  result.evaluations = evals;
  return result;
}

}  // namespace heavytail
