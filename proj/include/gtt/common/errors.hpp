#pragma once

#include <stdexcept>
#include <string>

namespace gtt {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration: missing placeholder, bad plan file, unknown model.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Input outside a function's domain (unknown tabular context, bad row sums).
class DomainError : public Error {
 public:
  using Error::Error;
};

class EstimationError : public Error {
 public:
  using Error::Error;
};

}  // namespace gtt
