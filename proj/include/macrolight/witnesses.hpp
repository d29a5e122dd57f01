#pragma once

// Leggett-Garg correlators and K witness, no-signaling-in-time
// distributions and Bhattacharyya coefficients, and their extremization
// over the analyzer angles.

#include <array>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "macrolight/cascade.hpp"
#include "macrolight/events.hpp"
#include "macrolight/simplex.hpp"

namespace macrolight {

// Denominators below this are treated as an empty post-selection.
inline constexpr double kProbabilityFloor = 1e-300;

struct AngleGrid {
  int resolution = 60;

  double angle(int k) const;
  std::vector<double> angles() const;
  void validate() const;
};

struct OptimizeOptions {
  AngleGrid grid;
  bool refine = true;
  int restarts = 5;
  SimplexOptions simplex;
};

struct WitnessReport {
  double value = 0.0;
  std::vector<double> angles;  // radians in [0, pi)
  bool refined = false;
  long evaluations = 0;
};

double bhattacharyya(std::span<const double> p, std::span<const double> q);

// Normalizes log-domain probabilities; throws EmptyPostSelection when they
// are all zero.
std::vector<double> normalize(std::span<const SignedLog> probs);

double correlation(const EventProbs2& probs);
double correlation(double theta_p, double theta_q, const Scheme& s, FockInput in, double r);

double lgi_k(double theta1, double theta2, double theta3, const Scheme& s, FockInput in, double r);
double lgi_k(EventEvaluator& events, double theta1, double theta2, double theta3);

WitnessReport kmax(const Scheme& s, FockInput in, double r, const OptimizeOptions& options = {});

// (P_b(theta2), P'_b(theta1, theta2)) as distributions over {X, Y}.
std::pair<std::array<double, 2>, std::array<double, 2>> nsit_dists_two(
    double theta1, double theta2, const Scheme& s, FockInput in, double r);

// (P_bc(theta2, theta3), P'_bc(theta1, theta2, theta3)) over {XX, XY, YX, YY}.
std::pair<std::array<double, 4>, std::array<double, 4>> nsit_dists_three(
    double theta1, double theta2, double theta3, const Scheme& s, FockInput in, double r);

double v12_at(EventEvaluator& events, double theta1, double theta2);
double v123_at(EventEvaluator& events, double theta1, double theta2, double theta3);

// Throw NotEnoughPhotons when the input cannot supply two (three) accepted
// detections.
WitnessReport v12(const Scheme& s, FockInput in, double r, const OptimizeOptions& options = {});
WitnessReport v123(const Scheme& s, FockInput in, double r, const OptimizeOptions& options = {});

// Photon number above which |N, round(N/6)> stops violating the LGI.
// N is scanned upward from `start` with geometric stride `growth` until a
// violating point is followed by a non-violating one; that bracket is then
// bisected to integer resolution. `n_c` is the smallest non-violating N found.
struct CriticalSearch {
  std::optional<int> n_c;       // empty if no crossing below `limit`
  std::optional<int> last_violating;
  std::vector<std::pair<int, double>> samples;  // (N, K_max) in evaluation order
};

inline constexpr double kViolationMargin = 1e-9;

int sixth_of(int n);

CriticalSearch find_critical_n(const Scheme& s, double r, const OptimizeOptions& options = {},
                               int start = 6, int limit = 16000, double growth = 1.5);

}  // namespace macrolight
