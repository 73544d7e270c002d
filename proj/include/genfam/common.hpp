#pragma once

#include <stdexcept>
#include <string>

namespace genfam {

// Relative tolerance for numerical rank decisions (singular values are kept
// when sigma > rank_tol * sigma_max). Shared by subspace and Hessian code.
inline constexpr double kRankTol = 1e-8;

// Residual norm below which a point is accepted as critical when evaluating
// maps that are only defined on the critical set.
inline constexpr double kCriticalTol = 1e-8;

// Thrown when a primitive is evaluated outside its domain (sqrt of a
// negative number, log of a non-positive number, division by zero, ...).
class domain_error : public std::runtime_error {
 public:
  explicit domain_error(const std::string& msg, bool annotated = false)
      : std::runtime_error(msg), annotated_(annotated) {}
  // True once the error message carries the offending sub-expression.
  bool annotated() const { return annotated_; }

 private:
  bool annotated_;
};

// Thrown when an operation that is only defined on the critical set is
// requested at a point whose vertical residual is not small enough.
class not_critical_error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parse failure with a byte offset into the source text.
class parse_error : public std::runtime_error {
 public:
  parse_error(const std::string& msg, std::size_t offset)
      : std::runtime_error(msg + " (offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace genfam
