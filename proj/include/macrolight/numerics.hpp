#pragma once

// Log-domain arithmetic for factorial-scale combinatorial sums.
//
// Amplitudes for |N,M> inputs with N,M in the thousands involve binomials
// and factorial ratios far outside the range of a double, while the number
// of detected photons stays small. Every such quantity is carried as a
// sign plus a natural-log magnitude and only converted back to linear scale
// after the large factors have cancelled.

#include <optional>
#include <span>
#include <vector>

namespace macrolight {

inline constexpr int kDefaultMaxPhotons = 20000;

// Relative size below which a signed sum is snapped to exact zero.
inline constexpr long double kCancellationThreshold = 1e-15L;

struct SignedLog {
  int sign = 0;               // -1, 0 or +1; 0 is exact zero
  long double logmag = 0.0L;  // ln|v|, ignored when sign == 0

  static SignedLog zero() { return {}; }
  static SignedLog one() { return {1, 0.0L}; }
  static SignedLog from_log(long double logmag, int sign = 1) {
    return sign == 0 ? SignedLog{} : SignedLog{sign > 0 ? 1 : -1, logmag};
  }
  static SignedLog encode(long double value);

  bool is_zero() const { return sign == 0; }
  long double decode() const;
  double to_double() const { return static_cast<double>(decode()); }
};

SignedLog operator*(SignedLog a, SignedLog b);
SignedLog operator/(SignedLog a, SignedLog b);

// Integer power with 0^0 == 1.
SignedLog pow(SignedLog base, int exponent);

SignedLog signed_product(std::span<const SignedLog> factors);

// Sum with the largest magnitude factored out and the scaled remainder
// accumulated with Neumaier compensation. Results whose magnitude falls
// below kCancellationThreshold relative to the largest term become zero.
SignedLog signed_sum(std::span<const SignedLog> terms);

// ln(n!) for n = 0..max_argument, accumulated in extended precision.
class LogFactorialTable {
 public:
  explicit LogFactorialTable(int max_argument = kDefaultMaxPhotons);

  int max_argument() const { return static_cast<int>(values_.size()) - 1; }
  // Throws CapacityError for n > max_argument().
  long double operator()(int n) const;
  std::span<const long double> values() const { return values_; }

 private:
  std::vector<long double> values_;
};

// Process-wide table, built once on first use and read-only afterwards.
const LogFactorialTable& log_factorials();

long double log_factorial(int n);

// ln C(n, k); nullopt when k < 0 or k > n (the term is structurally zero).
std::optional<long double> log_binomial(int n, int k);

}  // namespace macrolight
