#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hylyap {

/// Bad arguments: dimension mismatch, malformed input, unsupported combination.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A point lies outside the set on which an object is defined.
class DomainError : public std::domain_error {
 public:
  DomainError(const std::string& what, std::vector<double> point)
      : std::domain_error(what), point_(std::move(point)) {}

  [[nodiscard]] const std::vector<double>& point() const { return point_; }

 private:
  std::vector<double> point_;
};

/// Integration produced a non-finite state. Carries the last finite state.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, std::vector<double> last_valid, double t)
      : std::runtime_error(what), last_valid_(std::move(last_valid)), t_(t) {}

  [[nodiscard]] const std::vector<double>& last_valid() const { return last_valid_; }
  [[nodiscard]] double time() const { return t_; }

 private:
  std::vector<double> last_valid_;
  double t_;
};

/// A theorem hypothesis required by a check does not hold for the supplied data.
class HypothesisError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Lattice expression cannot be flattened into conic regions.
class UnsupportedExpression : public UsageError {
 public:
  using UsageError::UsageError;
};

/// Filippov evaluation at a singular point of the switching surface (2Qx = 0).
class SingularPoint : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Sliding classification is ambiguous (grazing or repulsive surface).
class AmbiguousSliding : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An internal invariant was violated (e.g. regions do not cover a point that should be covered).
class InternalInconsistency : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace hylyap
