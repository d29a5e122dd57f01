#pragma once

// Dichotomization of photon counts into x/y events and aggregation of bare
// cascade probabilities into event probabilities P_a, P_ab and P_abc.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "macrolight/cascade.hpp"
#include "macrolight/numerics.hpp"

namespace macrolight {

enum class EventLabel { X = 0, Y = 1 };

char to_char(EventLabel label);

// Sharp(w): keep only (w, 0) and (0, w).
// Blurred(lo, hi): each detector reads 0 or a count in [lo, hi], majority
// vote decides the label. Fair(hi) is Blurred(1, hi).
class Scheme {
 public:
  enum class Kind { Sharp, Blurred };

  static Scheme sharp(int omega);
  static Scheme blurred(int omega_min, int omega_max);
  static Scheme fair(int omega_max) { return blurred(1, omega_max); }

  // "s2", "f4", "b2-4". Throws ConfigError naming the offending token.
  static Scheme parse(std::string_view text);
  std::string render() const;

  Kind kind() const { return kind_; }
  int omega_min() const { return lo_; }
  int omega_max() const { return hi_; }
  // Fewest photons a single accepted outcome can hold.
  int min_detected() const { return lo_; }

  friend bool operator==(const Scheme&, const Scheme&) = default;

 private:
  Scheme(Kind kind, int lo, int hi) : kind_(kind), lo_(lo), hi_(hi) {}
  Kind kind_;
  int lo_;
  int hi_;
};

// nullopt means the outcome is discarded by post-selection.
std::optional<EventLabel> classify(Outcome w, const Scheme& s);

// Accepted outcomes holding at most max_total photons, in (wx, wy) order.
std::vector<std::pair<Outcome, EventLabel>> accepted_outcomes(const Scheme& s, int max_total);

// Index layout: one-port [a], two-port [2a + b], three-port [4a + 2b + c]
// with X = 0, Y = 1.
using EventProbs1 = std::array<SignedLog, 2>;
using EventProbs2 = std::array<SignedLog, 4>;
using EventProbs3 = std::array<SignedLog, 8>;

inline int event_index(EventLabel a) { return static_cast<int>(a); }
inline int event_index(EventLabel a, EventLabel b) { return 2 * event_index(a) + event_index(b); }
inline int event_index(EventLabel a, EventLabel b, EventLabel c) {
  return 4 * event_index(a) + 2 * event_index(b) + event_index(c);
}

// Event probabilities for a fixed scheme, input and reflectivity, evaluated
// at arbitrary analyzer angles. Reuses cascade transfer matrices across
// calls, so grid scans are cheap. Not thread-safe.
class EventEvaluator {
 public:
  EventEvaluator(Scheme scheme, FockInput in, double r);

  const Scheme& scheme() const { return scheme_; }
  FockInput input() const { return engine_.input(); }
  double reflectivity() const { return engine_.reflectivity(); }

  EventProbs1 one(double theta);
  EventProbs2 two(double theta1, double theta2);
  EventProbs3 three(double theta1, double theta2, double theta3);

  // Same as calling two()/three() for each entry of `last`, sharing the
  // post-states of the leading ports.
  std::vector<EventProbs2> two_row(double theta1, std::span<const double> last);
  std::vector<EventProbs3> three_row(double theta1, double theta2, std::span<const double> last);

 private:
  Scheme scheme_;
  CascadeEngine engine_;
  std::vector<std::pair<Outcome, EventLabel>> accepted_;
};

// Reference aggregation straight from the SignedLog cascade functions.
double event_prob_one(EventLabel a, const Scheme& s, FockInput in, PortConfig port);
double event_prob_two(EventLabel a, EventLabel b, const Scheme& s, FockInput in,
                      std::array<PortConfig, 2> ports);
double event_prob_three(EventLabel a, EventLabel b, EventLabel c, const Scheme& s, FockInput in,
                        std::array<PortConfig, 3> ports);

}  // namespace macrolight
