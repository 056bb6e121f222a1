#pragma once

#include <stdexcept>
#include <string>

namespace seqdet {

/// Base class for all seqdet error conditions.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// The prior's survival mass P(nu >= n) reached exactly zero while a
/// statistic still needed it as a divisor (e.g. a truncated prior whose
/// support was exhausted mid-run).
class DegeneratePriorError : public Error {
 public:
  using Error::Error;
};

/// A false-alarm budget alpha that no threshold can honor for the given
/// prior (alpha outside (0, 1-q), or a prior with zero mean change point
/// for the Shiryaev-Roberts calibration).
class InvalidBudgetError : public Error {
 public:
  using Error::Error;
};

/// An observation index outside the supplied history.
class InvalidIndexError : public Error {
 public:
  using Error::Error;
};

/// Too many Monte Carlo trials hit the simulation horizon unresolved.
class CensoringExceededError : public Error {
 public:
  using Error::Error;
};

/// Every Monte Carlo trial ended in a false alarm; no delay sample exists.
class NoSurvivorsError : public Error {
 public:
  using Error::Error;
};

/// A regression fit over probability estimates could not be formed
/// (e.g. a zero estimate under a log transform).
class DegenerateFitError : public Error {
 public:
  using Error::Error;
};

/// A malformed experiment config; carries a line/field diagnostic.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace seqdet
