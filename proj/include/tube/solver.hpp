#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tube/generator.hpp"
#include "tube/state_space.hpp"

namespace tube {

/// Probability vector over a StateSpace. Sub-stochastic once mass has been
/// absorbed at the truncation boundary; `defect` tracks the missing mass.
struct DistVector {
  std::vector<double> weights;
  double defect = 0.0;

  double sum() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }
};

inline DistVector delta_origin(const StateSpace& space) {
  DistVector v;
  v.weights.assign(space.size(), 0.0);
  v.weights[0] = 1.0;
  return v;
}

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

// v' = v P where P = I + Q/Lambda (distribution step; scatter by rows).
inline void forward_step(const RateMatrix& q, const std::vector<double>& v,
                         std::vector<double>& out) {
  const std::size_t n = q.size();
  const double inv_lambda = 1.0 / q.lambda;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = v[i] * (1.0 - q.outflow[i] * inv_lambda);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double vi = v[i];
    if (vi == 0.0) continue;
    for (std::uint64_t e = q.row_ptr[i]; e < q.row_ptr[i + 1]; ++e) {
      out[q.col[e]] += vi * q.rate[e] * inv_lambda;
    }
  }
}

// h' = P h (backward step for endpoint functions; gather by rows).
inline void backward_step(const RateMatrix& q, const std::vector<double>& h,
                          std::vector<double>& out) {
  const std::size_t n = q.size();
  const double inv_lambda = 1.0 / q.lambda;
  for (std::size_t i = 0; i < n; ++i) {
    double acc = h[i] * (1.0 - q.outflow[i] * inv_lambda);
    for (std::uint64_t e = q.row_ptr[i]; e < q.row_ptr[i + 1]; ++e) {
      acc += q.rate[e] * inv_lambda * h[q.col[e]];
    }
    out[i] = acc;
  }
}

inline double log_poisson_pmf(double mean, std::uint64_t k) {
  if (mean == 0.0) return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  return -mean + static_cast<double>(k) * std::log(mean) -
         std::lgamma(static_cast<double>(k) + 1.0);
}

// Runs the uniformized Poisson series sum_k Pois(Lambda t; k) step^k(v0)
// until the accumulated Poisson mass reaches 1 - tol.
template <typename Step>
std::vector<double> poisson_series(const RateMatrix& q, std::vector<double> v, double t,
                                   double tol, std::uint64_t max_terms, Step step) {
  const double mean = q.lambda * t;
  std::vector<double> result(v.size(), 0.0);
  std::vector<double> next(v.size(), 0.0);
  double cumulative = 0.0;
  for (std::uint64_t k = 0;; ++k) {
    const double lw = log_poisson_pmf(mean, k);
    const double w = lw > -745.0 ? std::exp(lw) : 0.0;
    if (w > 0.0) {
      for (std::size_t i = 0; i < v.size(); ++i) result[i] += w * v[i];
      cumulative += w;
    }
    if (cumulative >= 1.0 - tol) break;
    if (k >= max_terms) {
      throw SolverError("uniformization series did not reach 1-tol after " +
                        std::to_string(max_terms) + " terms (Lambda*t = " +
                        std::to_string(mean) + "); raise the term cap or split t");
    }
    step(q, v, next);
    v.swap(next);
  }
  return result;
}

}  // namespace detail

/// Distribution of X_t killed on exiting {D <= N}, by uniformization.
/// The Poisson series is truncated once its mass reaches 1 - tol, so the
/// result is accurate to tol in total variation.
inline DistVector transient(const RateMatrix& q, const DistVector& init, double t,
                            double tol = 1e-12, std::uint64_t max_terms = 1'000'000) {
  if (t < 0.0) throw std::invalid_argument("transient: t must be >= 0");
  if (!(tol > 0.0)) throw std::invalid_argument("transient: tol must be > 0");
  if (init.weights.size() != q.size()) {
    throw std::invalid_argument("transient: init dimension mismatch");
  }
  DistVector out;
  out.weights =
      detail::poisson_series(q, init.weights, t, tol, max_terms, detail::forward_step);
  const double mass_in = init.sum() + init.defect;
  out.defect = std::max(0.0, mass_in - out.sum());
  return out;
}

/// Backward endpoint function h_s(x) = P(X_t = O and the path stays in the
/// space | X_s = x), evaluated at each requested s in `grid`.
inline std::vector<std::vector<double>> backward_h(const RateMatrix& q, double t,
                                                   std::span<const double> grid,
                                                   double tol = 1e-12) {
  std::vector<std::vector<double>> res;
  res.reserve(grid.size());
  for (double s : grid) {
    if (s < 0.0 || s > t) throw std::invalid_argument("backward_h: grid point outside [0,t]");
    std::vector<double> e0(q.size(), 0.0);
    e0[0] = 1.0;
    res.push_back(
        detail::poisson_series(q, std::move(e0), t - s, tol, 1'000'000, detail::backward_step));
  }
  return res;
}

/// P(X_t = O, max_{s<=t} D_s <= N) starting from O: a rigorous lower bound
/// for the true return probability, nondecreasing in N.
inline double return_probability(const StateSpace& space, const RateMatrix& q, double t,
                                 double tol = 1e-12) {
  const DistVector v = transient(q, delta_origin(space), t, tol);
  return v.weights[0];
}

struct ReturnProbability {
  double value = 0.0;
  double defect = 0.0;  // absorbed mass: the truncation error certificate
};

inline ReturnProbability return_probability_certified(const StateSpace& space,
                                                      const RateMatrix& q, double t,
                                                      double tol = 1e-12) {
  const DistVector v = transient(q, delta_origin(space), t, tol);
  return {v.weights[0], v.defect};
}

inline double return_probability(double p, double t, std::int32_t n, double tol = 1e-12) {
  StateSpace space(n);
  return return_probability(space, build_generator(space, p), t, tol);
}

/// Marginal law of X_s under the truncated bridge (O at both ends):
/// forward(s) * h_s pointwise, normalized.
inline DistVector bridge_marginal(const StateSpace& space, const RateMatrix& q, double t,
                                  double s, double tol = 1e-12) {
  if (s < 0.0 || s > t) throw std::invalid_argument("bridge_marginal: s outside [0,t]");
  const DistVector fwd = transient(q, delta_origin(space), s, tol);
  const std::array<double, 1> grid{s};
  const std::vector<double> h = backward_h(q, t, grid, tol).front();
  DistVector out;
  out.weights.resize(space.size());
  double norm = 0.0;
  for (std::size_t i = 0; i < out.weights.size(); ++i) {
    out.weights[i] = fwd.weights[i] * h[i];
    norm += out.weights[i];
  }
  if (!(norm > 1e-290)) {
    throw SolverError("bridge normalizer underflow (P(O->O) ~ " + std::to_string(norm) +
                      "); the bridge is numerically unreachable at t = " + std::to_string(t));
  }
  for (double& w : out.weights) w /= norm;
  out.defect = 0.0;
  return out;
}

/// Relative residual of the p <-> 1-p duality on the truncated space:
/// every O -> O path has equally many jumps each way, so the two return
/// probabilities differ by exactly e^{(2p-1)t}.
inline double duality_residual(double p, double t, std::int32_t n, double tol = 1e-12) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("duality_residual: p in (0,1)");
  StateSpace space(n);
  const double rp = return_probability(space, build_generator(space, p), t, tol);
  const double rq = return_probability(space, build_generator(space, 1.0 - p), t, tol);
  return std::abs(rp * std::exp((2.0 * p - 1.0) * t) - rq) / rq;
}

/// Relative residual of the symmetric square-sum identity
/// P(X_t = O) = sum_x P(X_{t/2} = x)^2, on the truncated space (exact there
/// because the killed p = 1/2 generator is symmetric).
inline double square_sum_residual(double t, std::int32_t n, double tol = 1e-12) {
  StateSpace space(n);
  const RateMatrix q = build_generator(space, 0.5);
  const double lhs = return_probability(space, q, t, tol);
  const DistVector half = transient(q, delta_origin(space), t / 2.0, tol);
  double rhs = 0.0;
  for (double w : half.weights) rhs += w * w;
  return std::abs(lhs - rhs) / lhs;
}

/// Stationary distribution of the reflecting truncated chain (p < 1/2),
/// by power iteration on the uniformized kernel. The residual is the
/// largest entry of pi Q at return.
inline DistVector truncated_stationary(const StateSpace& space, const RateMatrix& q,
                                       double residual_tol = 1e-12,
                                       std::uint64_t max_iters = 4'000'000) {
  if (q.boundary != Boundary::Reflect) {
    throw std::invalid_argument("truncated_stationary: build the generator with Boundary::Reflect");
  }
  const std::size_t n = q.size();
  std::vector<double> pi(n, 1.0 / static_cast<double>(n));
  std::vector<double> next(n, 0.0);
  auto residual = [&] {
    double worst = 0.0;
    std::vector<double> flow(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      flow[i] -= pi[i] * q.outflow[i];
      for (std::uint64_t e = q.row_ptr[i]; e < q.row_ptr[i + 1]; ++e) {
        flow[q.col[e]] += pi[i] * q.rate[e];
      }
    }
    for (double f : flow) worst = std::max(worst, std::abs(f));
    return worst;
  };
  for (std::uint64_t iter = 1; iter <= max_iters; ++iter) {
    detail::forward_step(q, pi, next);
    pi.swap(next);
    const double total = std::accumulate(pi.begin(), pi.end(), 0.0);
    for (double& w : pi) w /= total;
    if (iter % 64 == 0 || iter == max_iters) {
      if (residual() <= residual_tol) {
        for (double w : pi) {
          if (!(w > 0.0)) throw SolverError("truncated_stationary: vanishing stationary mass");
        }
        return {std::move(pi), 0.0};
      }
    }
  }
  throw SolverError("truncated_stationary: power iteration did not reach residual " +
                    std::to_string(residual_tol));
}

}  // namespace tube
