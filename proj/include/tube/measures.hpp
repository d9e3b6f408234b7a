#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "tube/config.hpp"
#include "tube/rng.hpp"

namespace tube {

/// Occupation probability of site i under the blocking measure:
/// 1 / (1 + ((1-p)/p)^i). Defined for p != 1/2.
inline double blocking_site_prob(double p, std::int64_t i) {
  if (!(p > 0.0 && p < 1.0) || p == 0.5) {
    throw std::invalid_argument("blocking_site_prob: needs p in (0,1), p != 1/2");
  }
  const double log_q = std::log1p(-p) - std::log(p);  // log((1-p)/p)
  // evaluate through exp(i log q) for stability at large |i|
  return 1.0 / (1.0 + std::exp(static_cast<double>(i) * log_q));
}

/// The excursion-scale constant c(p) = 1 / |log((1-p)/p)|.
inline double c_of_p(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("c_of_p: p in (0,1)");
  if (p == 0.5) {
    throw std::invalid_argument("c_of_p is undefined at p = 1/2 (the symmetric case "
                                "scales differently)");
  }
  return 1.0 / std::abs(std::log1p(-p) - std::log(p));
}

/// Stationary law of the reflecting walk bounding the front particle:
/// pi(i) = (1-2p)/(1-p) * (p/(1-p))^i for i >= 0 and p < 1/2.
inline double reflecting_walk_pi(double p, std::int64_t i) {
  if (!(p > 0.0 && p < 0.5)) throw std::invalid_argument("reflecting_walk_pi: p in (0,1/2)");
  if (i < 0) throw std::invalid_argument("reflecting_walk_pi: i >= 0");
  const double beta = p / (1.0 - p);
  return (1.0 - 2.0 * p) / (1.0 - p) * std::pow(beta, static_cast<double>(i));
}

/// Window specification for blocking-measure computations: sites outside
/// [-L, L] deviate from the step profile with total probability < epsilon.
struct BlockingSpec {
  double p;
  std::int64_t window;  // L
  double epsilon;       // certified tail mass outside the window

  static BlockingSpec for_epsilon(double p, double epsilon) {
    if (!(p > 0.0 && p < 0.5)) throw std::invalid_argument("BlockingSpec: p in (0,1/2)");
    if (!(epsilon > 0.0)) throw std::invalid_argument("BlockingSpec: epsilon > 0");
    // sum_{|i|>L} min(r_i, 1-r_{-i}) = 2 sum_{i>L} r_i < 2 q^{-L} / (q - 1)
    std::int64_t window = 1;
    double tail = tail_mass(p, window);
    while (tail >= epsilon) {
      ++window;
      tail = tail_mass(p, window);
      if (window > 100000) throw std::invalid_argument("BlockingSpec: epsilon unattainable");
    }
    return {p, window, epsilon};
  }

  static double tail_mass(double p, std::int64_t window) {
    double sum = 0.0;
    for (std::int64_t i = window + 1;; ++i) {
      const double r = blocking_site_prob(p, i);
      sum += 2.0 * r;  // hole-side tail is identical by r_i = 1 - r_{-i}
      if (r < 1e-300 || r < sum * 1e-18) break;
    }
    return sum;
  }
};

/// Law of the conserved surplus N+ - N- under the blocking measure,
/// by exact convolution of the per-site Bernoulli contributions on
/// [-L, L]. The window tail is certified by spec.epsilon.
struct SurplusDistribution {
  std::int64_t min_value;          // support offset
  std::vector<double> probability;  // indexed by value - min_value
  double tail_defect;

  double at(std::int64_t value) const {
    const std::int64_t idx = value - min_value;
    if (idx < 0 || idx >= static_cast<std::int64_t>(probability.size())) return 0.0;
    return probability[static_cast<std::size_t>(idx)];
  }
};

inline SurplusDistribution surplus_distribution(const BlockingSpec& spec) {
  const std::int64_t window = spec.window;
  // support of N+ - N- restricted to the window: [-(window), window + 1]
  const std::int64_t lo = -window - 1, hi = window + 2;
  std::vector<double> dist(static_cast<std::size_t>(hi - lo), 0.0);
  dist[static_cast<std::size_t>(-lo)] = 1.0;
  std::vector<double> next(dist.size(), 0.0);
  auto convolve_step = [&](double prob_shift, std::int64_t shift) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < dist.size(); ++i) {
      const double v = dist[i];
      if (v == 0.0) continue;
      next[i] += v * (1.0 - prob_shift);
      const std::int64_t j = static_cast<std::int64_t>(i) + shift;
      if (j >= 0 && j < static_cast<std::int64_t>(dist.size())) {
        next[static_cast<std::size_t>(j)] += v * prob_shift;
      }
    }
    dist.swap(next);
  };
  for (std::int64_t i = 0; i <= window; ++i) {
    convolve_step(blocking_site_prob(spec.p, i), +1);  // particle at i >= 0
  }
  for (std::int64_t j = -1; j >= -window; --j) {
    convolve_step(1.0 - blocking_site_prob(spec.p, j), -1);  // hole at j < 0
  }
  return {lo, std::move(dist), spec.epsilon};
}

/// mu_p(O) = prod_{i>=0}(1-r_i) prod_{j<0} r_j, in log space.
inline double blocking_mass_at_origin(double p, std::int64_t window) {
  double log_mass = std::log(0.5);  // site 0
  for (std::int64_t i = 1; i <= window; ++i) {
    // 1 - r_i = r_{-i}: both factors per |i| equal 1/(1+q^{-i})... careful:
    // (1 - r_i) * r_{-i} = (1 - r_i)^2 by the particle-hole symmetry.
    log_mass += 2.0 * std::log1p(-blocking_site_prob(p, i));
  }
  return std::exp(log_mass);
}

/// alpha = mu_p(O) / mu_p(U0): the stationary atom at the origin for
/// p < 1/2, computed from the infinite products with a window chosen from
/// epsilon.
inline double alpha(double p, double epsilon = 1e-12) {
  const BlockingSpec spec = BlockingSpec::for_epsilon(p, epsilon);
  const SurplusDistribution surplus = surplus_distribution(spec);
  return blocking_mass_at_origin(p, spec.window) / surplus.at(0);
}

struct MeasuresError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Draws from mu_p conditioned on U0 by rejection: sample the window sites
/// independently, accept when the surplus balances.
inline Configuration sample_blocking_conditioned(double p, const BlockingSpec& spec,
                                                 RngStream stream,
                                                 std::uint64_t attempt_cap = 1'000'000) {
  if (!(p > 0.0 && p < 0.5)) {
    throw std::invalid_argument("sample_blocking_conditioned: p in (0,1/2)");
  }
  RngEngine eng(stream);
  const std::int64_t window = spec.window;
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(2 * window + 1));
  for (std::uint64_t attempt = 1; attempt <= attempt_cap; ++attempt) {
    std::int64_t surplus = 0;
    for (std::int64_t s = -window; s <= window; ++s) {
      const bool occ = eng.u01() < blocking_site_prob(p, s);
      bits[static_cast<std::size_t>(s + window)] = occ ? 1 : 0;
      if (s >= 0 && occ) ++surplus;
      if (s < 0 && !occ) --surplus;
    }
    if (surplus == 0) {
      return from_occupancy(bits, static_cast<Site>(-window));
    }
  }
  throw MeasuresError("sample_blocking_conditioned: no acceptance in " +
                      std::to_string(attempt_cap) + " attempts (acceptance ~ mu_p(U0))");
}

/// Upper bound prod_{i>0}(1 + (p e^{1/c} / (1-p))^i) for E[e^{S+/c}] under
/// the blocking measure; finite exactly when c > c(p).
inline double exp_moment_bound(double p, double c) {
  if (!(p > 0.0 && p < 0.5)) throw std::invalid_argument("exp_moment_bound: p in (0,1/2)");
  const double rho = p * std::exp(1.0 / c) / (1.0 - p);
  if (!(rho < 1.0)) {
    throw std::invalid_argument("exp_moment_bound: the product diverges for c <= c(p) "
                                "(needs e^{1/c} < (1-p)/p)");
  }
  double log_sum = 0.0;
  double term = rho;
  while (term > 1e-18) {
    log_sum += std::log1p(term);
    term *= rho;
  }
  return std::exp(log_sum);
}

namespace detail {

inline double log_normal_cdf(double x) {
  // accurate -log Phi through erfc on both tails
  return std::log1p(-0.5 * std::erfc(x / std::numbers::sqrt2));
}

template <typename F>
double adaptive_simpson(F f, double a, double b, double fa, double fm, double fb, double tol,
                        int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0) throw MeasuresError("quadrature did not converge");
  if (std::abs(left + right - whole) <= 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return adaptive_simpson(f, a, m, fa, flm, fm, tol / 2.0, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, tol / 2.0, depth - 1);
}

}  // namespace detail

struct TheoremConstants {
  double c;        // pi / sqrt(6)
  double c_prime;  // integral of -log Phi over [0, inf)
};

/// The two constants in the symmetric return-probability bounds. c is
/// closed-form; c' integrates -log Phi adaptively on [0, 8] and bounds the
/// remaining tail by the Mills-ratio asymptotic, certified below tol.
inline TheoremConstants theorem_constants(double tol = 1e-6) {
  if (!(tol > 0.0)) throw std::invalid_argument("theorem_constants: tol > 0");
  auto f = [](double x) { return -detail::log_normal_cdf(x); };
  const double a = 0.0, b = 8.0;
  const double body =
      detail::adaptive_simpson(f, a, b, f(a), f(0.5 * (a + b)), f(b), tol / 2.0, 60);
  // -log Phi(x) ~ phi(x)/x for large x; integral over [8, inf) is below
  // phi(8)/8^2, which is ~1e-17 and folded into the certificate.
  const double tail_bound = std::exp(-32.0) / (std::sqrt(2.0 * std::numbers::pi) * 64.0);
  return {std::numbers::pi / std::sqrt(6.0), body + tail_bound};
}

}  // namespace tube
