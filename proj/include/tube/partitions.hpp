#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace tube {

using BigInt = boost::multiprecision::cpp_int;

/// p(0), ..., p(n) by Euler's pentagonal-number recurrence, exact.
inline std::vector<BigInt> partition_table(std::int64_t n) {
  if (n < 0) throw std::invalid_argument("partition_table: n must be nonnegative");
  std::vector<BigInt> p(static_cast<std::size_t>(n) + 1);
  p[0] = 1;
  for (std::int64_t m = 1; m <= n; ++m) {
    BigInt sum = 0;
    for (std::int64_t k = 1;; ++k) {
      const std::int64_t g1 = k * (3 * k - 1) / 2;
      if (g1 > m) break;
      const std::int64_t g2 = k * (3 * k + 1) / 2;
      const bool plus = k % 2 == 1;
      if (plus) {
        sum += p[static_cast<std::size_t>(m - g1)];
        if (g2 <= m) sum += p[static_cast<std::size_t>(m - g2)];
      } else {
        sum -= p[static_cast<std::size_t>(m - g1)];
        if (g2 <= m) sum -= p[static_cast<std::size_t>(m - g2)];
      }
    }
    p[static_cast<std::size_t>(m)] = sum;
  }
  return p;
}

/// Number of integer partitions of n. p(n) overflows 64 bits near n = 400,
/// so the result is an arbitrary-precision integer.
inline BigInt partition_count(std::int64_t n) {
  return partition_table(n).back();
}

/// Total number of states within distance N of the origin.
inline BigInt states_within(std::int64_t n) {
  BigInt total = 0;
  for (const BigInt& v : partition_table(n)) total += v;
  return total;
}

/// Hardy-Ramanujan first-order approximation exp(pi sqrt(2n/3)) / (4 n sqrt(3)).
inline double hardy_ramanujan(std::int64_t n) {
  if (n < 1) throw std::invalid_argument("hardy_ramanujan: n must be positive");
  const double x = static_cast<double>(n);
  return std::exp(std::numbers::pi * std::sqrt(2.0 * x / 3.0)) / (4.0 * x * std::sqrt(3.0));
}

}  // namespace tube
