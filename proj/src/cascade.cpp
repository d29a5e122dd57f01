#include "macrolight/cascade.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "macrolight/errors.hpp"

namespace macrolight {

namespace {

constexpr std::size_t kMaxCachedTransfers = 1u << 15;

SignedLog binomial(int n, int k) {
  const auto lb = log_binomial(n, k);
  return lb ? SignedLog::from_log(*lb) : SignedLog::zero();
}

// t^(N+M) (r/t)^omega written as t^(N+M-omega) r^omega so the r = 0 and
// r = 1 endpoints resolve through 0^0 = 1.
SignedLog reflection_prefactor(int total, int omega, double r) {
  const long double rr = r;
  const long double tt = std::sqrt(std::max(0.0L, 1.0L - rr * rr));
  return pow(SignedLog::encode(tt), total - omega) * pow(SignedLog::encode(rr), omega);
}

}  // namespace

void FockInput::validate() const {
  if (n < 0 || m < 0) {
    throw std::invalid_argument("photon numbers must be nonnegative");
  }
  if (total() > kDefaultMaxPhotons) {
    throw CapacityError("N + M = " + std::to_string(total()) + " exceeds maximum " +
                        std::to_string(kDefaultMaxPhotons));
  }
}

double reduce_angle(double theta) {
  double a = std::fmod(theta, std::numbers::pi);
  if (a < 0) a += std::numbers::pi;
  if (a >= std::numbers::pi) a = 0.0;
  return a;
}

double PortConfig::t() const { return std::sqrt(std::max(0.0, 1.0 - r * r)); }

void PortConfig::validate() const {
  if (!(r >= 0.0 && r <= 1.0)) {
    throw std::invalid_argument("reflectivity must lie in [0, 1]");
  }
  if (!std::isfinite(theta)) throw std::invalid_argument("angle must be finite");
}

SignedLog PostState::squared_norm() const {
  std::vector<SignedLog> terms;
  terms.reserve(coefficients.size());
  for (const auto& [n, c] : coefficients) terms.push_back(c * c);
  return signed_sum(terms);
}

namespace {

// Angle-independent part of the single-port amplitude:
// t^(N+M) (r/t)^omega C(N,n) C(M,omega-n) sqrt((N-n)!(M+n-omega)! wx! wy! / (N! M!)).
SignedLog count_weight(int n, Outcome w, FockInput in, double r) {
  const int omega = w.total();
  if (w.wx < 0 || w.wy < 0 || in.n < 0 || in.m < 0) return SignedLog::zero();
  if (n < 0 || n > omega || n > in.n || omega - n > in.m) return SignedLog::zero();
  const SignedLog pre = reflection_prefactor(in.total(), omega, r);
  if (pre.is_zero()) return SignedLog::zero();
  const auto& lf = log_factorials();
  const long double root =
      0.5L * (lf(in.n - n) + lf(in.m + n - omega) + lf(w.wx) + lf(w.wy) - lf(in.n) - lf(in.m));
  return pre * binomial(in.n, n) * binomial(in.m, omega - n) * SignedLog::from_log(root);
}

// sum_i (-1)^i C(n,i) C(omega-n, wy-i) cos^(wy+n-2i) sin^(wx-n+2i), which
// depends on the input only through which n are admissible.
SignedLog analyzer_sum(int n, Outcome w, double theta) {
  const int omega = w.total();
  const double reduced = reduce_angle(theta);
  const SignedLog c = SignedLog::encode(std::cos(static_cast<long double>(reduced)));
  const SignedLog s = SignedLog::encode(std::sin(static_cast<long double>(reduced)));
  const int i_lo = std::max(0, n - w.wx);
  const int i_hi = std::min(w.wy, n);
  std::vector<SignedLog> terms;
  terms.reserve(static_cast<std::size_t>(std::max(0, i_hi - i_lo + 1)));
  for (int i = i_lo; i <= i_hi; ++i) {
    SignedLog term = binomial(n, i) * binomial(omega - n, w.wy - i) *
                     pow(c, w.wy + n - 2 * i) * pow(s, w.wx - n + 2 * i);
    if (i % 2 != 0) term.sign = -term.sign;
    terms.push_back(term);
  }
  return signed_sum(terms);
}

}  // namespace

SignedLog amplitude_first(int n, Outcome w, FockInput in, PortConfig port) {
  const SignedLog weight = count_weight(n, w, in, port.r);
  if (weight.is_zero()) return weight;
  return weight * analyzer_sum(n, w, port.theta);
}

PortResult prob_one_port(Outcome w, FockInput in, PortConfig port) {
  PostState start{in, 0, {{0, SignedLog::one()}}};
  PostState out = apply_port(start, w, port);
  return {out.squared_norm(), std::move(out)};
}

PostState apply_port(const PostState& state, Outcome w, PortConfig port) {
  const FockInput in = state.input;
  const int before = state.detected;
  const int after = before + w.total();
  PostState out{in, after, {}};

  const int lo = std::max(0, after - in.m);
  const int hi = std::min(after, in.n);
  for (int s = lo; s <= hi; ++s) {
    std::vector<SignedLog> terms;
    for (const auto& [n, c] : state.coefficients) {
      const int k = s - n;
      if (k < 0 || k > w.total()) continue;
      const FockInput shifted{in.n - n, in.m + n - before};
      terms.push_back(c * amplitude_first(k, w, shifted, port));
    }
    const SignedLog amp = signed_sum(terms);
    if (!amp.is_zero()) out.coefficients.emplace_back(s, amp);
  }
  return out;
}

SignedLog amplitude_second(int s, std::array<Outcome, 2> w, FockInput in,
                           std::array<PortConfig, 2> ports) {
  const int omega1 = w[0].total();
  const int m_lo = std::max({0, omega1 - in.m, s - w[1].total()});
  const int m_hi = std::min({omega1, in.n, s});
  std::vector<SignedLog> terms;
  for (int m = m_lo; m <= m_hi; ++m) {
    terms.push_back(amplitude_first(m, w[0], in, ports[0]) *
                    amplitude_first(s - m, w[1], {in.n - m, in.m + m - omega1}, ports[1]));
  }
  return signed_sum(terms);
}

PortResult prob_two_port(std::array<Outcome, 2> w, FockInput in,
                         std::array<PortConfig, 2> ports) {
  PostState state = prob_one_port(w[0], in, ports[0]).state;
  state = apply_port(state, w[1], ports[1]);
  return {state.squared_norm(), std::move(state)};
}

SignedLog amplitude_third(int t_idx, std::array<Outcome, 3> w, FockInput in,
                          std::array<PortConfig, 3> ports) {
  const int omega12 = w[0].total() + w[1].total();
  const int l_lo = std::max({0, omega12 - in.m, t_idx - w[2].total()});
  const int l_hi = std::min({omega12, in.n, t_idx});
  std::vector<SignedLog> terms;
  for (int l = l_lo; l <= l_hi; ++l) {
    terms.push_back(amplitude_second(l, {w[0], w[1]}, in, {ports[0], ports[1]}) *
                    amplitude_first(t_idx - l, w[2], {in.n - l, in.m + l - omega12}, ports[2]));
  }
  return signed_sum(terms);
}

PortResult prob_three_port(std::array<Outcome, 3> w, FockInput in,
                           std::array<PortConfig, 3> ports) {
  PostState state = prob_two_port({w[0], w[1]}, in, {ports[0], ports[1]}).state;
  state = apply_port(state, w[2], ports[2]);
  return {state.squared_norm(), std::move(state)};
}

// ---------------------------------------------------------------------------

bool ScaledState::is_zero() const {
  return std::all_of(amps.begin(), amps.end(), [](double a) { return a == 0.0; });
}

SignedLog ScaledState::squared_norm() const {
  long double acc = 0.0L;
  for (double a : amps) acc += static_cast<long double>(a) * a;
  if (acc == 0.0L) return SignedLog::zero();
  return SignedLog::from_log(2.0L * log_scale + std::log(acc));
}

CascadeEngine::CascadeEngine(FockInput in, double r) : in_(in), r_(r) {
  in_.validate();
  PortConfig{0.0, r}.validate();
}

ScaledState CascadeEngine::initial() const { return {0, 0.0L, {1.0}}; }

const std::vector<SignedLog>& CascadeEngine::weights(int detected, Outcome w) {
  const std::tuple<int, int, int> key{detected, w.wx, w.wy};
  if (auto it = weights_.find(key); it != weights_.end()) return it->second;
  const int rows = detected + 1;
  const int cols = w.total() + 1;
  std::vector<SignedLog> out(static_cast<std::size_t>(rows) * cols);
  for (int n = 0; n < rows; ++n) {
    const FockInput shifted{in_.n - n, in_.m + n - detected};
    if (shifted.n < 0 || shifted.m < 0) continue;
    for (int k = 0; k < cols; ++k) {
      out[static_cast<std::size_t>(n) * cols + k] = count_weight(k, w, shifted, r_);
    }
  }
  return weights_.emplace(key, std::move(out)).first->second;
}

CascadeEngine::Transfer CascadeEngine::build_transfer(double theta, int detected, Outcome w) {
  Transfer tr;
  tr.rows = detected + 1;
  tr.cols = w.total() + 1;
  const auto& weight = weights(detected, w);
  std::vector<SignedLog> trig(static_cast<std::size_t>(tr.cols));
  for (int k = 0; k < tr.cols; ++k) trig[k] = analyzer_sum(k, w, theta);

  std::vector<SignedLog> entries(weight.size());
  long double top = -std::numeric_limits<long double>::infinity();
  for (int n = 0; n < tr.rows; ++n) {
    for (int k = 0; k < tr.cols; ++k) {
      const std::size_t idx = static_cast<std::size_t>(n) * tr.cols + k;
      entries[idx] = weight[idx] * trig[k];
      if (!entries[idx].is_zero()) top = std::max(top, entries[idx].logmag);
    }
  }
  tr.values.assign(entries.size(), 0.0);
  if (!std::isfinite(top)) return tr;
  tr.zero = false;
  tr.log_scale = top;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (!entries[i].is_zero()) {
      tr.values[i] = entries[i].sign * static_cast<double>(std::exp(entries[i].logmag - top));
    }
  }
  return tr;
}

const CascadeEngine::Transfer& CascadeEngine::transfer(double theta, int detected, Outcome w) {
  const double reduced = reduce_angle(theta);
  const Key key{std::bit_cast<std::uint64_t>(reduced), detected, w.wx, w.wy};
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  if (cache_.size() >= kMaxCachedTransfers) {
    scratch_ = build_transfer(reduced, detected, w);
    return scratch_;
  }
  return cache_.emplace(key, build_transfer(reduced, detected, w)).first->second;
}

ScaledState CascadeEngine::apply(const ScaledState& state, double theta, Outcome w) {
  ScaledState out;
  out.detected = state.detected + w.total();
  out.amps.assign(static_cast<std::size_t>(out.detected) + 1, 0.0);
  if (out.detected > in_.total() || state.is_zero()) return out;

  const Transfer& tr = transfer(theta, state.detected, w);
  if (tr.zero) return out;
  for (int n = 0; n < tr.rows; ++n) {
    const double a = state.amps[n];
    if (a == 0.0) continue;
    const double* row = &tr.values[static_cast<std::size_t>(n) * tr.cols];
    for (int k = 0; k < tr.cols; ++k) out.amps[n + k] += a * row[k];
  }
  double top = 0.0;
  for (double a : out.amps) top = std::max(top, std::fabs(a));
  if (top == 0.0) return out;
  for (double& a : out.amps) a /= top;
  out.log_scale = state.log_scale + tr.log_scale + std::log(static_cast<long double>(top));
  return out;
}

}  // namespace macrolight
