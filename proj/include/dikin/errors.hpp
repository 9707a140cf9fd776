#pragma once

#include <stdexcept>
#include <string>

namespace dikin {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

// A pivot of a symmetric factorization was not strictly positive. For barrier
// matrices this signals a point outside the interior or broken weights.
struct NotPositiveDefinite : Error {
  using Error::Error;
};

struct NotInterior : Error {
  using Error::Error;
};

// Caller asked for a solve against weights that do not match the weights the
// solver state currently represents (a sequencing bug on the caller's side).
struct StaleState : Error {
  using Error::Error;
};

struct UnsupportedDimension : Error {
  using Error::Error;
};

struct UnsupportedValidation : Error {
  using Error::Error;
};

struct TargetEvaluationError : Error {
  using Error::Error;
};

// Invalid run configuration; `field` names the offending input.
struct ConfigError : Error {
  explicit ConfigError(const std::string& field, const std::string& what)
      : Error("config error at '" + field + "': " + what), field(field) {}
  std::string field;
};

}  // namespace dikin
