#include "macrolight/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "macrolight/errors.hpp"

namespace macrolight {

SignedLog SignedLog::encode(long double value) {
  if (value == 0.0L) return zero();
  return {value > 0 ? 1 : -1, std::log(std::fabs(value))};
}

long double SignedLog::decode() const {
  if (sign == 0) return 0.0L;
  return sign * std::exp(logmag);
}

SignedLog operator*(SignedLog a, SignedLog b) {
  if (a.is_zero() || b.is_zero()) return SignedLog::zero();
  return {a.sign * b.sign, a.logmag + b.logmag};
}

SignedLog operator/(SignedLog a, SignedLog b) {
  if (b.is_zero()) {
    return {a.sign == 0 ? 1 : a.sign, std::numeric_limits<long double>::infinity()};
  }
  if (a.is_zero()) return SignedLog::zero();
  return {a.sign * b.sign, a.logmag - b.logmag};
}

SignedLog pow(SignedLog base, int exponent) {
  if (exponent == 0) return SignedLog::one();
  if (base.is_zero()) return SignedLog::zero();
  const int sign = (base.sign < 0 && (exponent % 2 != 0)) ? -1 : 1;
  return {sign, base.logmag * exponent};
}

SignedLog signed_product(std::span<const SignedLog> factors) {
  SignedLog out = SignedLog::one();
  for (const auto& f : factors) {
    if (f.is_zero()) return SignedLog::zero();
    out.sign *= f.sign;
    out.logmag += f.logmag;
  }
  return out;
}

SignedLog signed_sum(std::span<const SignedLog> terms) {
  long double top = -std::numeric_limits<long double>::infinity();
  for (const auto& t : terms) {
    if (!t.is_zero()) top = std::max(top, t.logmag);
  }
  if (!std::isfinite(top)) return SignedLog::zero();

  long double sum = 0.0L;
  long double comp = 0.0L;
  for (const auto& t : terms) {
    if (t.is_zero()) continue;
    const long double x = t.sign * std::exp(t.logmag - top);
    const long double s = sum + x;
    if (std::fabs(sum) >= std::fabs(x)) {
      comp += (sum - s) + x;
    } else {
      comp += (x - s) + sum;
    }
    sum = s;
  }
  sum += comp;
  if (std::fabs(sum) < kCancellationThreshold) return SignedLog::zero();
  return {sum > 0 ? 1 : -1, top + std::log(std::fabs(sum))};
}

LogFactorialTable::LogFactorialTable(int max_argument) {
  if (max_argument < 1) max_argument = 1;
  values_.resize(static_cast<std::size_t>(max_argument) + 1);
  values_[0] = 0.0L;
  values_[1] = 0.0L;
  for (int n = 2; n <= max_argument; ++n) {
    values_[n] = values_[n - 1] + std::log(static_cast<long double>(n));
  }
}

long double LogFactorialTable::operator()(int n) const {
  if (n < 0) throw std::domain_error("log_factorial of negative argument");
  if (n <= 1) return 0.0L;
  if (n > max_argument()) {
    throw CapacityError("log_factorial(" + std::to_string(n) +
                        ") exceeds table maximum " + std::to_string(max_argument()));
  }
  return values_[n];
}

const LogFactorialTable& log_factorials() {
  static const LogFactorialTable table(kDefaultMaxPhotons);
  return table;
}

long double log_factorial(int n) { return log_factorials()(n); }

std::optional<long double> log_binomial(int n, int k) {
  if (n < 0 || k < 0 || k > n) return std::nullopt;
  if (k == 0 || k == n) return 0.0L;
  const auto& lf = log_factorials();
  return lf(n) - lf(k) - lf(n - k);
}

}  // namespace macrolight
