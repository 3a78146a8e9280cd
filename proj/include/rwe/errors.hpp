#pragma once

#include <stdexcept>

namespace rwe {

/// Malformed or degenerate input data. The CLI maps this to exit code 2;
/// contract violations (bad arguments) throw std::invalid_argument instead.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rwe
