#pragma once

#include <stdexcept>
#include <string>

namespace rcnet {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Time step too coarse for the network: the implied one-step map is unstable.
class UnstableDiscretization : public Error {
 public:
  using Error::Error;
};

/// Matrix or panel shapes do not line up.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A coloring filter would produce a non-stationary input process.
class NonStationaryFilter : public Error {
 public:
  using Error::Error;
};

/// A file on disk does not match the expected format.
class MalformedFile : public Error {
 public:
  using Error::Error;
};

/// Too few samples for the requested fit.
class InsufficientSamples : public Error {
 public:
  using Error::Error;
};

/// An iterative solver produced a non-finite or increasing objective.
class SolverDiverged : public Error {
 public:
  using Error::Error;
};

/// A (target, source) pair that does not exist in a filter bank.
class UnknownPair : public Error {
 public:
  using Error::Error;
};

/// The closed-loop transfer matrix is numerically singular at a frequency.
class SingularAtFrequency : public Error {
 public:
  using Error::Error;
};

/// A reconstruction error was requested against an empty truth edge set.
class EmptyTruth : public Error {
 public:
  using Error::Error;
};

/// An iterative solver hit its sweep budget without converging.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

/// Bad or inconsistent run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace rcnet
