#include "macrolight/witnesses.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>

#include "macrolight/errors.hpp"

namespace macrolight {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Lattice candidates ordered by score (lower is better). Insertion happens in
// lexicographic angle order, so equal scores keep the earliest tuple.
class BestCandidates {
 public:
  explicit BestCandidates(int capacity) : capacity_(std::max(1, capacity)) {}

  void offer(double score, std::vector<double> angles) {
    if (!std::isfinite(score)) return;
    if (static_cast<int>(items_.size()) == capacity_ && score >= items_.back().first) return;
    auto pos = std::upper_bound(items_.begin(), items_.end(), score,
                                [](double s, const auto& item) { return s < item.first; });
    items_.insert(pos, {score, std::move(angles)});
    if (static_cast<int>(items_.size()) > capacity_) items_.pop_back();
  }
  bool empty() const { return items_.empty(); }
  const auto& items() const { return items_; }

 private:
  int capacity_;
  std::vector<std::pair<double, std::vector<double>>> items_;
};

// score = sense * witness, minimized; sense = -1 maximizes the witness.
WitnessReport finish(const BestCandidates& lattice, double sense, long lattice_evals,
                     const std::function<double(std::span<const double>)>& witness,
                     const OptimizeOptions& options) {
  if (lattice.empty()) {
    throw EmptyPostSelection("post-selection is empty at every grid point");
  }
  WitnessReport report;
  report.evaluations = lattice_evals;
  double best_score = lattice.items().front().first;
  std::vector<double> best_angles = lattice.items().front().second;

  if (options.refine) {
    report.refined = true;
    auto objective = [&](std::span<const double> x) {
      try {
        return sense * witness(x);
      } catch (const EmptyPostSelection&) {
        return std::numeric_limits<double>::infinity();
      }
    };
    int restarts = 0;
    for (const auto& [score, start] : lattice.items()) {
      if (restarts++ >= options.restarts) break;
      SimplexResult res = nelder_mead(objective, start, options.simplex);
      report.evaluations += res.evaluations;
      for (double& a : res.x) a = reduce_angle(a);
      const double refined_score = objective(res.x);
      ++report.evaluations;
      if (refined_score < best_score ||
          (refined_score == best_score && res.x < best_angles)) {
        best_score = refined_score;
        best_angles = res.x;
      }
    }
  }
  report.value = sense * best_score;
  report.angles = best_angles;
  return report;
}

int min_photons_per_detection(const Scheme& s) { return s.min_detected(); }

void require_photons(const Scheme& s, FockInput in, int detections) {
  const int needed = detections * min_photons_per_detection(s);
  if (in.total() < needed) {
    throw NotEnoughPhotons("scheme " + s.render() + " needs at least " + std::to_string(needed) +
                           " photons for " + std::to_string(detections) +
                           " detections, input holds " + std::to_string(in.total()));
  }
}

}  // namespace

double AngleGrid::angle(int k) const { return k * std::numbers::pi / resolution; }

std::vector<double> AngleGrid::angles() const {
  std::vector<double> out(static_cast<std::size_t>(resolution));
  for (int k = 0; k < resolution; ++k) out[k] = angle(k);
  return out;
}

void AngleGrid::validate() const {
  if (resolution < 8) throw ConfigError("angle grid needs at least 8 points per axis");
}

double bhattacharyya(std::span<const double> p, std::span<const double> q) {
  double acc = 0.0;
  for (std::size_t i = 0; i < std::min(p.size(), q.size()); ++i) {
    const double prod = p[i] * q[i];
    if (prod > 0.0) acc += std::sqrt(prod);
  }
  return acc;
}

std::vector<double> normalize(std::span<const SignedLog> probs) {
  const SignedLog total = signed_sum(probs);
  if (total.is_zero()) throw EmptyPostSelection("no accepted events");
  std::vector<double> out(probs.size(), 0.0);
  // Rescaled by the total, so the floor only trips on exact zeros.
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!probs[i].is_zero()) out[i] = static_cast<double>(std::exp(probs[i].logmag - total.logmag));
  }
  double denom = 0.0;
  for (double v : out) denom += v;
  if (!(denom > kProbabilityFloor)) throw EmptyPostSelection("no accepted events");
  for (double& v : out) v /= denom;
  return out;
}

double correlation(const EventProbs2& probs) {
  const auto p = normalize(probs);
  const double xx = p[event_index(EventLabel::X, EventLabel::X)];
  const double xy = p[event_index(EventLabel::X, EventLabel::Y)];
  const double yx = p[event_index(EventLabel::Y, EventLabel::X)];
  const double yy = p[event_index(EventLabel::Y, EventLabel::Y)];
  return (xx + yy) - (xy + yx);
}

double correlation(double theta_p, double theta_q, const Scheme& s, FockInput in, double r) {
  EventEvaluator events(s, in, r);
  return correlation(events.two(theta_p, theta_q));
}

double lgi_k(EventEvaluator& events, double theta1, double theta2, double theta3) {
  return correlation(events.two(theta1, theta2)) + correlation(events.two(theta2, theta3)) -
         correlation(events.two(theta1, theta3));
}

double lgi_k(double theta1, double theta2, double theta3, const Scheme& s, FockInput in,
             double r) {
  EventEvaluator events(s, in, r);
  return lgi_k(events, theta1, theta2, theta3);
}

WitnessReport kmax(const Scheme& s, FockInput in, double r, const OptimizeOptions& options) {
  options.grid.validate();
  EventEvaluator events(s, in, r);
  const int g = options.grid.resolution;
  const auto grid = options.grid.angles();

  std::vector<double> table(static_cast<std::size_t>(g) * g, kNaN);
  for (int i = 0; i < g; ++i) {
    const auto row = events.two_row(grid[i], grid);
    for (int j = 0; j < g; ++j) {
      try {
        table[static_cast<std::size_t>(i) * g + j] = correlation(row[j]);
      } catch (const EmptyPostSelection&) {
      }
    }
  }
  auto c = [&](int i, int j) { return table[static_cast<std::size_t>(i) * g + j]; };

  BestCandidates best(options.restarts);
  long evals = 0;
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) {
      const double c12 = c(i, j);
      if (std::isnan(c12)) continue;
      for (int k = 0; k < g; ++k) {
        ++evals;
        const double k_value = c12 + c(j, k) - c(i, k);
        if (!std::isnan(k_value)) best.offer(-k_value, {grid[i], grid[j], grid[k]});
      }
    }
  }

  EventEvaluator refine_events(s, in, r);
  auto witness = [&](std::span<const double> x) {
    return lgi_k(refine_events, x[0], x[1], x[2]);
  };
  return finish(best, -1.0, evals, witness, options);
}

std::pair<std::array<double, 2>, std::array<double, 2>> nsit_dists_two(
    double theta1, double theta2, const Scheme& s, FockInput in, double r) {
  EventEvaluator events(s, in, r);
  const auto single = normalize(events.one(theta2));
  const auto joint = normalize(events.two(theta1, theta2));
  std::array<double, 2> p{single[0], single[1]};
  std::array<double, 2> q{};
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) q[b] += joint[2 * a + b];
  }
  return {p, q};
}

std::pair<std::array<double, 4>, std::array<double, 4>> nsit_dists_three(
    double theta1, double theta2, double theta3, const Scheme& s, FockInput in, double r) {
  EventEvaluator events(s, in, r);
  const auto pair = normalize(events.two(theta2, theta3));
  const auto triple = normalize(events.three(theta1, theta2, theta3));
  std::array<double, 4> p{pair[0], pair[1], pair[2], pair[3]};
  std::array<double, 4> q{};
  for (int a = 0; a < 2; ++a) {
    for (int bc = 0; bc < 4; ++bc) q[bc] += triple[4 * a + bc];
  }
  return {p, q};
}

namespace {

std::array<double, 2> marginal_last(const std::vector<double>& joint) {
  return {joint[0] + joint[2], joint[1] + joint[3]};
}

std::array<double, 4> marginal_last_two(const std::vector<double>& joint) {
  std::array<double, 4> q{};
  for (int a = 0; a < 2; ++a) {
    for (int bc = 0; bc < 4; ++bc) q[bc] += joint[4 * a + bc];
  }
  return q;
}

}  // namespace

double v12_at(EventEvaluator& events, double theta1, double theta2) {
  const auto p = normalize(events.one(theta2));
  const auto q = marginal_last(normalize(events.two(theta1, theta2)));
  return bhattacharyya(p, q);
}

double v123_at(EventEvaluator& events, double theta1, double theta2, double theta3) {
  const auto p = normalize(events.two(theta2, theta3));
  const auto q = marginal_last_two(normalize(events.three(theta1, theta2, theta3)));
  return bhattacharyya(p, q);
}

WitnessReport v12(const Scheme& s, FockInput in, double r, const OptimizeOptions& options) {
  options.grid.validate();
  require_photons(s, in, 2);
  EventEvaluator events(s, in, r);
  const int g = options.grid.resolution;
  const auto grid = options.grid.angles();

  std::vector<std::vector<double>> single(g);
  for (int j = 0; j < g; ++j) {
    try {
      single[j] = normalize(events.one(grid[j]));
    } catch (const EmptyPostSelection&) {
    }
  }

  BestCandidates best(options.restarts);
  long evals = 0;
  for (int i = 0; i < g; ++i) {
    const auto row = events.two_row(grid[i], grid);
    for (int j = 0; j < g; ++j) {
      ++evals;
      if (single[j].empty()) continue;
      try {
        const auto q = marginal_last(normalize(row[j]));
        best.offer(bhattacharyya(single[j], q), {grid[i], grid[j]});
      } catch (const EmptyPostSelection&) {
      }
    }
  }

  EventEvaluator refine_events(s, in, r);
  auto witness = [&](std::span<const double> x) { return v12_at(refine_events, x[0], x[1]); };
  return finish(best, 1.0, evals, witness, options);
}

WitnessReport v123(const Scheme& s, FockInput in, double r, const OptimizeOptions& options) {
  options.grid.validate();
  require_photons(s, in, 3);
  EventEvaluator events(s, in, r);
  const int g = options.grid.resolution;
  const auto grid = options.grid.angles();

  // pair[j][k]: P_bc(theta_j, theta_k)
  std::vector<std::vector<std::vector<double>>> pair(g, std::vector<std::vector<double>>(g));
  for (int j = 0; j < g; ++j) {
    const auto row = events.two_row(grid[j], grid);
    for (int k = 0; k < g; ++k) {
      try {
        pair[j][k] = normalize(row[k]);
      } catch (const EmptyPostSelection&) {
      }
    }
  }

  BestCandidates best(options.restarts);
  long evals = 0;
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) {
      const auto row = events.three_row(grid[i], grid[j], grid);
      for (int k = 0; k < g; ++k) {
        ++evals;
        if (pair[j][k].empty()) continue;
        try {
          const auto q = marginal_last_two(normalize(row[k]));
          best.offer(bhattacharyya(pair[j][k], q), {grid[i], grid[j], grid[k]});
        } catch (const EmptyPostSelection&) {
        }
      }
    }
  }

  EventEvaluator refine_events(s, in, r);
  auto witness = [&](std::span<const double> x) {
    return v123_at(refine_events, x[0], x[1], x[2]);
  };
  return finish(best, 1.0, evals, witness, options);
}

int sixth_of(int n) { return static_cast<int>(std::lround(n / 6.0)); }

CriticalSearch find_critical_n(const Scheme& s, double r, const OptimizeOptions& options,
                               int start, int limit, double growth) {
  if (start < 1 || limit < start || !(growth > 1.0)) {
    throw ConfigError("critical search needs 1 <= start <= limit and growth > 1");
  }
  CriticalSearch out;
  auto violates = [&](int n) {
    double k = -std::numeric_limits<double>::infinity();
    try {
      k = kmax(s, {n, sixth_of(n)}, r, options).value;
    } catch (const EmptyPostSelection&) {
    }
    out.samples.emplace_back(n, k);
    return k > 1.0 + kViolationMargin;
  };

  std::optional<int> lo;
  int n = start;
  while (true) {
    if (violates(n)) {
      lo = n;
    } else if (lo) {
      int hi = n;
      while (hi - *lo > 1) {
        const int mid = *lo + (hi - *lo) / 2;
        if (violates(mid)) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      out.n_c = hi;
      out.last_violating = lo;
      return out;
    }
    if (n >= limit) break;
    n = std::min(limit, std::max(n + 1, static_cast<int>(std::ceil(n * growth))));
  }
  out.last_violating = lo;
  return out;
}

}  // namespace macrolight
