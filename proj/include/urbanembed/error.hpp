#pragma once

#include <stdexcept>
#include <string>

namespace urbanembed {

// Input data failed validation (bad ids, negative counts, missing columns).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computation produced NaN/Inf or otherwise diverged.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace urbanembed
