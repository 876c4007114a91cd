#pragma once

#include <stdexcept>
#include <string>

namespace etfad {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Seed index outside [0, n).
class SeedIndexError : public Error {
 public:
  using Error::Error;
};

/// Active operands with different derivative lengths, or a fixed-capacity
/// derivative array asked to grow past its capacity.
class SizeMismatchError : public Error {
 public:
  using Error::Error;
};

/// Raised only in strict domain mode; see set_strict_domain().
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Expression argument index outside [0, num_args).
class ArgIndexError : public Error {
 public:
  using Error::Error;
};

/// An oracle could not produce a trustworthy reference value.
class OracleError : public Error {
 public:
  using Error::Error;
};

/// A benchmark could not batch enough work to rise above the clock
/// resolution.
class TimerResolutionError : public Error {
 public:
  using Error::Error;
};

/// Sampled kernel state produced a non-finite residual.
class StateSamplingError : public Error {
 public:
  using Error::Error;
};

/// Output file could not be written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace etfad
