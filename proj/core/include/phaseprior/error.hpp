#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace phaseprior {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes or lengths that do not agree.
class InvalidDimension : public Error {
 public:
  using Error::Error;
};

/// A scalar parameter outside its admissible range.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// A plugin lacks something the caller needs (e.g. a Lipschitz bound).
class MissingCapability : public Error {
 public:
  using Error::Error;
};

/// A metric that is not defined for its input (e.g. cosine of a zero vector).
class UndefinedMetric : public Error {
 public:
  using Error::Error;
};

/// Input data failing validation; carries the offending flat indices.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& what, std::vector<std::size_t> indices)
      : Error(what), indices_(std::move(indices)) {}
  const std::vector<std::size_t>& indices() const { return indices_; }

 private:
  std::vector<std::size_t> indices_;
};

/// Failure talking to, or reported by, an external bridge process.
class BridgeError : public Error {
 public:
  explicit BridgeError(const std::string& what, long iteration = -1)
      : Error(what), iteration_(iteration) {}
  /// Solver iteration at which the failure happened, or -1 outside a solver.
  long iteration() const { return iteration_; }

 private:
  long iteration_;
};

}  // namespace phaseprior
