#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace heavytail {

/// Numerical routine failed to reach its tolerance; carries the best estimate found.
class convergence_error : public std::runtime_error {
 public:
  convergence_error(const std::string& msg, double best_estimate, double error_estimate)
      : std::runtime_error(msg), best_estimate_(best_estimate), error_estimate_(error_estimate) {}

  double best_estimate() const noexcept { return best_estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double best_estimate_;
  double error_estimate_;
};

/// Malformed input file; carries the 1-based line number where parsing failed.
class parse_error : public std::runtime_error {
 public:
  parse_error(const std::string& msg, std::size_t line)
      : std::runtime_error(msg + " (line " + std::to_string(line) + ")"), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Input violated a documented invariant (non-monotone dates, bad parameter range, ...).
class validation_error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace heavytail
