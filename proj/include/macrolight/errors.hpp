#pragma once

#include <stdexcept>
#include <string>

namespace macrolight {

// Requested size exceeds a precomputed table or the oracle's Fock cutoff.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Every outcome accepted by the scheme has zero probability, so no
// normalized statistic can be formed.
class EmptyPostSelection : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The input does not hold enough photons for the requested number of
// detections (e.g. three sharp detections on |1,1>).
class NotEnoughPhotons : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed user-facing configuration (scheme strings, ranges, flags).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace macrolight
