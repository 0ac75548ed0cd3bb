#pragma once

#include <stdexcept>
#include <string>

namespace ckrr {

// Base for everything thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad user input: malformed configs, invalid parameters, unreadable files.
struct ConfigError : Error {
  using Error::Error;
};

// Numerical failure: singular systems, missing roots, violated model
// assumptions discovered at factorization time.
struct NumericalError : Error {
  using Error::Error;
};

struct DimensionMismatch : ConfigError {
  using ConfigError::ConfigError;
};

struct NonPositiveRidge : ConfigError {
  NonPositiveRidge() : ConfigError("ridge parameter must be strictly positive") {}
};

// Feature evaluation matrix has numerical rank below the requested k.
struct RankDeficientFeatures : NumericalError {
  explicit RankDeficientFeatures(int rank, int k)
      : NumericalError("feature matrix rank " + std::to_string(rank) +
                       " is below the requested dimension " + std::to_string(k)) {}
};

struct NoRoot : NumericalError {
  using NumericalError::NumericalError;
};

struct OverfittingDivergence : NumericalError {
  using NumericalError::NumericalError;
};

}  // namespace ckrr
