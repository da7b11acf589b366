#pragma once

#include <stdexcept>
#include <string>

namespace rangekit {

/// Thrown when a computation cannot be completed to the required accuracy
/// (certificate failure, truncation breakdown, infeasible constraint).
/// Domain errors on arguments use std::invalid_argument instead.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rangekit
