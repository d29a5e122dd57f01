#pragma once

// Brute-force reference for small photon numbers. Each port is simulated by
// expanding the creation operators of every basis ket through the beam
// splitter and the analyzer rotation, projecting the reflected modes onto
// the observed counts and keeping the transmitted modes. Plain linear
// arithmetic, no shared code with the cascade formulas.

#include <complex>
#include <map>
#include <utility>
#include <vector>

#include "macrolight/cascade.hpp"

namespace macrolight::oracle {

inline constexpr int kOracleCutoff = 12;

struct DenseTwoModeState {
  std::map<std::pair<int, int>, std::complex<double>> coefficients;
  int cutoff = kOracleCutoff;

  static DenseTwoModeState fock(FockInput in, int cutoff = kOracleCutoff);
  double squared_norm() const;
};

struct PortOutput {
  DenseTwoModeState state;
  double probability = 0.0;
};

// Throws CapacityError if the state holds kets above its cutoff.
PortOutput oracle_port(const DenseTwoModeState& state, PortConfig port, Outcome w);

// Probability of observing the given outcome at each of up to three ports.
double oracle_sequence(FockInput in, const std::vector<std::pair<PortConfig, Outcome>>& ports);

}  // namespace macrolight::oracle
