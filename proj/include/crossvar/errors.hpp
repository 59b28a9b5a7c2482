#pragma once

#include <stdexcept>
#include <string>

namespace crossvar {

/// Two paths (or a path and a resolution) that do not live on compatible grids.
class GridMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A model assumption (Hurst range, Hölder exponent window) is not satisfied.
class AssumptionViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Requested quantity is not defined in the regime of the given Hurst index.
class UnsupportedRegime : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class DivergentSeries : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed external input (config, CSV, binary dump).
class IngestionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace crossvar
