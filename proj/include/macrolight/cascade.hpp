#pragma once

// Post-selected amplitudes and bare outcome probabilities for a cascade of
// one to three detection ports acting on the two-mode Fock state |N,M>.
//
// Each port reflects part of the pulse off a beam splitter with amplitude
// reflectivity r (transmissivity t = sqrt(1 - r^2)), rotates the reflected
// polarization by theta and counts (wx, wy) photons on the rotated x/y
// detectors. After k ports that detected omega photons in total, the
// transmitted state is a superposition
//
//     sum_n  c_n |N - n, M + n - omega>
//
// whose squared norm is the probability of the observed count sequence.

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <tuple>
#include <utility>
#include <vector>

#include "macrolight/numerics.hpp"

namespace macrolight {

struct FockInput {
  int n = 0;  // photons polarized along x
  int m = 0;  // photons polarized along y

  int total() const { return n + m; }
  // Throws std::invalid_argument for negative counts and CapacityError when
  // the total exceeds kDefaultMaxPhotons.
  void validate() const;
  friend bool operator==(const FockInput&, const FockInput&) = default;
};

// Reduces an angle to [0, pi). Every probability is pi-periodic per port.
double reduce_angle(double theta);

struct PortConfig {
  double theta = 0.0;  // analyzer angle, radians
  double r = 0.0;      // amplitude reflectivity in [0, 1]

  double t() const;
  void validate() const;
};

struct Outcome {
  int wx = 0;
  int wy = 0;

  int total() const { return wx + wy; }
  friend bool operator==(const Outcome&, const Outcome&) = default;
  friend auto operator<=>(const Outcome&, const Outcome&) = default;
};

struct PostState {
  FockInput input;
  int detected = 0;  // photons removed by all ports so far
  // (n, c_n) for the ket |N - n, M + n - detected>
  std::vector<std::pair<int, SignedLog>> coefficients;

  SignedLog squared_norm() const;
};

struct PortResult {
  SignedLog probability;
  PostState state;

  double value() const { return probability.to_double(); }
};

// Amplitude of |N - n, M + n - omega1> after a single port detects w.
SignedLog amplitude_first(int n, Outcome w, FockInput in, PortConfig port);

PortResult prob_one_port(Outcome w, FockInput in, PortConfig port);

// Sends an existing post-selected state through one more port.
PostState apply_port(const PostState& state, Outcome w, PortConfig port);

SignedLog amplitude_second(int s, std::array<Outcome, 2> w, FockInput in,
                           std::array<PortConfig, 2> ports);
PortResult prob_two_port(std::array<Outcome, 2> w, FockInput in,
                         std::array<PortConfig, 2> ports);

SignedLog amplitude_third(int t_idx, std::array<Outcome, 3> w, FockInput in,
                          std::array<PortConfig, 3> ports);
PortResult prob_three_port(std::array<Outcome, 3> w, FockInput in,
                           std::array<PortConfig, 3> ports);

// Unnormalized post-state in block floating point: amplitude of index n is
// amps[n] * exp(log_scale). Indices n run over 0..detected; entries whose
// ket does not exist are zero.
struct ScaledState {
  int detected = 0;
  long double log_scale = 0.0L;
  std::vector<double> amps;

  bool is_zero() const;
  SignedLog squared_norm() const;
};

// Cascade evaluator for a fixed input and reflectivity. Transfer matrices
// for (angle, photons detected so far, outcome) are memoized, so sweeping
// many angle tuples over a fixed grid costs one small matrix-vector product
// per port. Not thread-safe; use one engine per worker.
class CascadeEngine {
 public:
  CascadeEngine(FockInput in, double r);

  FockInput input() const { return in_; }
  double reflectivity() const { return r_; }

  ScaledState initial() const;
  ScaledState apply(const ScaledState& state, double theta, Outcome w);

  std::size_t cache_size() const { return cache_.size(); }
  void clear_cache() { cache_.clear(); }

 private:
  struct Transfer {
    long double log_scale = 0.0L;
    int rows = 0;  // detected + 1
    int cols = 0;  // w.total() + 1
    std::vector<double> values;  // row-major, rows x cols
    bool zero = true;
  };
  using Key = std::tuple<std::uint64_t, int, int, int>;

  const Transfer& transfer(double theta, int detected, Outcome w);
  Transfer build_transfer(double theta, int detected, Outcome w);
  const std::vector<SignedLog>& weights(int detected, Outcome w);

  FockInput in_;
  double r_;
  std::map<Key, Transfer> cache_;
  std::map<std::tuple<int, int, int>, std::vector<SignedLog>> weights_;
  Transfer scratch_;
};

}  // namespace macrolight
