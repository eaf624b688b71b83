#pragma once

#include <stdexcept>
#include <string>

namespace wavecoh {

/// Bad or unusable input data: unreadable files, malformed rows, degenerate series.
class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Analysis parameters outside their admissible ranges.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace wavecoh
