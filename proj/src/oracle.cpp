#include "macrolight/oracle.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "macrolight/errors.hpp"

namespace macrolight::oracle {

namespace {

std::uint64_t choose(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::uint64_t out = 1;
  for (int i = 1; i <= k; ++i) out = out * static_cast<std::uint64_t>(n - k + i) / i;
  return out;
}

double factorial(int n) {
  double out = 1.0;
  for (int i = 2; i <= n; ++i) out *= i;
  return out;
}

double ipow(double base, int e) {
  double out = 1.0;
  for (int i = 0; i < e; ++i) out *= base;
  return out;
}

}  // namespace

DenseTwoModeState DenseTwoModeState::fock(FockInput in, int cutoff) {
  if (in.total() > cutoff) {
    throw CapacityError("oracle input holds " + std::to_string(in.total()) +
                        " photons, cutoff is " + std::to_string(cutoff));
  }
  DenseTwoModeState s;
  s.cutoff = cutoff;
  s.coefficients[{in.n, in.m}] = 1.0;
  return s;
}

double DenseTwoModeState::squared_norm() const {
  double acc = 0.0;
  for (const auto& [ket, amp] : coefficients) acc += std::norm(amp);
  return acc;
}

PortOutput oracle_port(const DenseTwoModeState& state, PortConfig port, Outcome w) {
  const double r = port.r;
  const double t = std::sqrt(std::max(0.0, 1.0 - r * r));
  const double c = std::cos(port.theta);
  const double s = std::sin(port.theta);

  PortOutput out;
  out.state.cutoff = state.cutoff;
  for (const auto& [ket, alpha] : state.coefficients) {
    const auto [nx, ny] = ket;
    if (nx + ny > state.cutoff) throw CapacityError("oracle state exceeds its cutoff");
    if (alpha == 0.0) continue;
    const double norm_in = 1.0 / std::sqrt(factorial(nx) * factorial(ny));

    // (t a_x^+ + r b_x^+)^nx (t a_y^+ + r b_y^+)^ny: p, q photons go to the
    // reflected x, y modes.
    for (int p = 0; p <= nx; ++p) {
      for (int q = 0; q <= ny; ++q) {
        if (p + q != w.total()) continue;
        const double split = static_cast<double>(choose(nx, p) * choose(ny, q)) *
                             ipow(t, nx - p + ny - q) * ipow(r, p + q);
        // b_x^+ -> c b_x^+ - s b_y^+,  b_y^+ -> s b_x^+ + c b_y^+
        double rotated = 0.0;
        for (int i = 0; i <= p; ++i) {
          for (int j = 0; j <= q; ++j) {
            if (i + j != w.wy) continue;
            const double sign = (i % 2 == 0) ? 1.0 : -1.0;
            rotated += sign * static_cast<double>(choose(p, i) * choose(q, j)) *
                       ipow(c, p - i + j) * ipow(s, i + q - j);
          }
        }
        if (rotated == 0.0) continue;
        const double ket_norms =
            std::sqrt(factorial(w.wx) * factorial(w.wy) * factorial(nx - p) * factorial(ny - q));
        out.state.coefficients[{nx - p, ny - q}] += alpha * norm_in * split * rotated * ket_norms;
      }
    }
  }
  out.probability = out.state.squared_norm();
  return out;
}

double oracle_sequence(FockInput in, const std::vector<std::pair<PortConfig, Outcome>>& ports) {
  if (ports.size() > 3) throw std::invalid_argument("oracle_sequence supports at most 3 ports");
  DenseTwoModeState state = DenseTwoModeState::fock(in);
  for (const auto& [port, w] : ports) state = oracle_port(state, port, w).state;
  return state.squared_norm();
}

}  // namespace macrolight::oracle
