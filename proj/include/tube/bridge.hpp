#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tube/config.hpp"
#include "tube/generator.hpp"
#include "tube/parallel.hpp"
#include "tube/rng.hpp"
#include "tube/simulate.hpp"
#include "tube/solver.hpp"
#include "tube/state_space.hpp"
#include "tube/trajectory.hpp"

namespace tube {

enum class BridgeMethod : std::uint8_t { Rejection, Duality, HTransform };

struct BridgeRequest {
  double p = 0.5;
  double t = 1.0;
  BridgeMethod method = BridgeMethod::Rejection;
  std::int32_t truncate = 0;  // HTransform only
  std::uint64_t samples = 1;
  RngStream stream;
  std::uint64_t attempt_cap = 10'000'000;
};

/// Outcome of one rejection run: either an exact bridge or the exhausted
/// attempt budget. Failure is a result, not an exception.
struct RejectionOutcome {
  std::optional<Trajectory> trajectory;
  std::uint64_t attempts = 0;
};

/// Unconditioned runs accepted on X_t = O; the accepted path is an exact
/// draw from the bridge law.
inline RejectionOutcome sample_bridge_rejection(double p, double t, RngStream stream,
                                                std::uint64_t attempt_cap = 10'000'000) {
  RngEngine eng(stream);
  for (std::uint64_t attempt = 1; attempt <= attempt_cap; ++attempt) {
    // each attempt draws a fresh sub-stream so trajectories stay replayable
    RngStream sub{eng.next_u64(), attempt};
    Trajectory tr = gillespie(origin(), p, t, sub);
    if (tr.final_state().is_origin()) return {std::move(tr), attempt};
    if (attempt % 1'000'000 == 0) {
      std::cerr << "[tube] rejection sampler: " << attempt << " attempts without a bridge (p="
                << p << ", t=" << t << ")\n";
    }
  }
  return {std::nullopt, attempt_cap};
}

/// Exact endpoint-conditioned sampler on the truncated space. Build once,
/// sample many: the backward vectors h_m = P^m e_O are cached and shared
/// read-only across sampling threads.
class HTransformSampler {
 public:
  HTransformSampler(double p, double t, std::int32_t truncate, double tol = 1e-13)
      : space_(truncate), gen_(build_generator(space_, p)), t_(t) {
    if (t < 0.0) throw std::invalid_argument("HTransformSampler: t >= 0");
    const double mean = gen_.lambda * t;
    // cache length: conditional epoch counts live under the Poisson tail
    std::uint64_t cap = static_cast<std::uint64_t>(
        std::ceil(mean + 12.0 * std::sqrt(mean + 1.0) + 30.0));
    const std::size_t n = space_.size();
    h_.reserve(cap + 1);
    h_.emplace_back(n, 0.0);
    h_[0][0] = 1.0;
    std::vector<double> next(n);
    double cum = 0.0;
    std::vector<double> weights;
    for (std::uint64_t m = 0;; ++m) {
      const double w = std::exp(detail::log_poisson_pmf(mean, m));
      weights.push_back(w * h_[m][0]);
      cum += w;
      if (cum >= 1.0 - tol || m >= cap) break;
      detail::backward_step(gen_, h_[m], next);
      h_.push_back(next);
    }
    double z = 0.0;
    for (double w : weights) z += w;
    if (!(z > 1e-290)) {
      throw SolverError(
          "h-transform endpoint probability underflow; decrease t or loosen tol");
    }
    endpoint_probability_ = z;
    cdf_.resize(weights.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i] / z;
      cdf_[i] = acc;
    }
    cdf_.back() = 1.0;
  }

  /// P(X_t = O and the path stays inside), the sampler's normalizer.
  double endpoint_probability() const { return endpoint_probability_; }
  const StateSpace& space() const { return space_; }

  Trajectory sample(RngStream stream) const {
    RngEngine eng(stream);
    // number of uniformization epochs, conditioned on the O -> O endpoint
    const double u = eng.u01();
    const std::uint64_t epochs =
        std::lower_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin();
    // epoch times are uniform order statistics on [0, t]
    std::vector<double> times(epochs);
    for (auto& ti : times) ti = eng.u01() * t_;
    std::sort(times.begin(), times.end());

    Trajectory tr{origin(), {}, t_};
    std::uint32_t state = 0;
    const double inv_lambda = 1.0 / gen_.lambda;
    std::vector<std::int32_t> rights, lefts;
    std::vector<Part> scratch;
    for (std::uint64_t step = 1; step <= epochs; ++step) {
      const std::vector<double>& h_next = h_[epochs - step];
      const double self_weight =
          (1.0 - gen_.outflow[state] * inv_lambda) * h_next[state];
      double total = self_weight;
      const auto parts = space_.parts_of(state);
      legal_move_indices(parts, rights, lefts);
      // gather in-space transitions in CSR order: rights then lefts
      const std::uint64_t row_begin = gen_.row_ptr[state];
      const std::uint64_t row_end = gen_.row_ptr[state + 1];
      for (std::uint64_t e = row_begin; e < row_end; ++e) {
        total += gen_.rate[e] * inv_lambda * h_next[gen_.col[e]];
      }
      double draw = eng.u01() * total - self_weight;
      if (draw < 0.0) continue;  // self-loop epoch: discarded
      std::uint32_t chosen = state;
      Move move{};
      bool found = false;
      std::size_t ri = 0, li = 0;
      const bool at_boundary = space_.distance_of(state) == space_.truncation();
      for (std::uint64_t e = row_begin; e < row_end && !found; ++e) {
        draw -= gen_.rate[e] * inv_lambda * h_next[gen_.col[e]];
        // CSR rows were built rights-first, lefts-second in index order
        Move mv{};
        if (!at_boundary && ri < rights.size()) {
          mv = {Direction::Right, rights[ri++]};
        } else {
          mv = {Direction::Left, lefts[li++]};
        }
        if (draw < 0.0) {
          chosen = gen_.col[e];
          move = mv;
          found = true;
        }
      }
      if (!found) continue;  // numerical edge: treat as self-loop
      state = chosen;
      tr.events.push_back({times[step - 1], move});
    }
    if (state != 0) {
      throw std::logic_error("h-transform sampler did not land on the origin");
    }
    return tr;
  }

 private:
  StateSpace space_;
  RateMatrix gen_;
  double t_;
  double endpoint_probability_ = 0.0;
  std::vector<std::vector<double>> h_;  // h_[m](x) = P^m(x, O)
  std::vector<double> cdf_;
};

inline Trajectory sample_bridge_htransform(double p, double t, std::int32_t truncate,
                                           RngStream stream) {
  return HTransformSampler(p, t, truncate).sample(stream);
}

struct BridgeSamplingError : std::runtime_error {
  std::uint64_t attempts;
  BridgeSamplingError(std::string msg, std::uint64_t n)
      : std::runtime_error(std::move(msg)), attempts(n) {}
};

struct BridgeEnsemble {
  std::vector<Trajectory> trajectories;
  double acceptance_rate = 1.0;  // rejection-based methods only
};

/// Ensemble sampler dispatching on the requested method. Duality samples at
/// parameter 1-p by rejection and returns the paths unchanged: conditioned
/// on returning, the p and 1-p processes have the same law.
inline BridgeEnsemble sample_bridge(const BridgeRequest& req) {
  if (!(req.p > 0.0 && req.p < 1.0)) throw std::invalid_argument("sample_bridge: p in (0,1)");
  BridgeEnsemble out;
  out.trajectories.resize(req.samples);

  if (req.method == BridgeMethod::HTransform) {
    HTransformSampler sampler(req.p, req.t, req.truncate);
    parallel_for(req.samples, [&](std::uint64_t i) {
      out.trajectories[i] = sampler.sample({req.stream.seed, req.stream.stream + i});
    });
    return out;
  }

  double sim_p = req.p;
  if (req.method == BridgeMethod::Duality) {
    if (!(req.p > 0.5)) {
      throw std::invalid_argument("sample_bridge: the duality method needs p > 1/2");
    }
    sim_p = 1.0 - req.p;
  } else if (req.p >= 0.5) {
    std::cerr << "[tube] note: rejection sampling at p >= 1/2 has acceptance decaying in t; "
                 "expect many attempts (p=" << req.p << ")\n";
  }

  std::vector<std::uint64_t> attempts(req.samples, 0);
  std::vector<std::uint8_t> failed(req.samples, 0);
  parallel_for(req.samples, [&](std::uint64_t i) {
    RejectionOutcome r = sample_bridge_rejection(sim_p, req.t,
                                                 {req.stream.seed, req.stream.stream + i},
                                                 req.attempt_cap);
    attempts[i] = r.attempts;
    if (r.trajectory) {
      out.trajectories[i] = std::move(*r.trajectory);
    } else {
      failed[i] = 1;
    }
  });
  std::uint64_t total_attempts = 0;
  for (std::uint64_t i = 0; i < req.samples; ++i) {
    total_attempts += attempts[i];
    if (failed[i]) {
      throw BridgeSamplingError("bridge rejection sampling exhausted " +
                                    std::to_string(req.attempt_cap) + " attempts (p=" +
                                    std::to_string(sim_p) + ", t=" + std::to_string(req.t) + ")",
                                attempts[i]);
    }
  }
  out.acceptance_rate =
      static_cast<double>(req.samples) / static_cast<double>(std::max<std::uint64_t>(1, total_attempts));
  return out;
}

/// Time reversal of a returning path: events mirrored to t_end - s with
/// directions flipped. An involution on bridges.
inline Trajectory reverse(const Trajectory& tr) {
  if (!(tr.final_state() == tr.initial)) {
    throw std::invalid_argument("reverse: trajectory does not return to its initial state");
  }
  Trajectory out{tr.initial, {}, tr.horizon};
  out.events.reserve(tr.events.size());
  for (auto it = tr.events.rbegin(); it != tr.events.rend(); ++it) {
    const Direction flipped =
        it->move.direction == Direction::Right ? Direction::Left : Direction::Right;
    out.events.push_back({tr.horizon - it->time, {flipped, it->move.particle}});
  }
  return out;
}

/// Ensemble summaries keyed by trajectory; every input must end at O.
struct BridgeStats {
  std::vector<std::int64_t> max_d;
  std::vector<Site> max_m;
  std::vector<std::array<Site, 5>> particle_max;  // k = 1..5 per sample
  double acceptance_rate = 1.0;

  template <typename T>
  static double mean_of(const std::vector<T>& v) {
    double s = 0.0;
    for (auto x : v) s += static_cast<double>(x);
    return s / static_cast<double>(v.size());
  }
  template <typename T>
  static double stderr_of(const std::vector<T>& v) {
    const double m = mean_of(v);
    double ss = 0.0;
    for (auto x : v) ss += (static_cast<double>(x) - m) * (static_cast<double>(x) - m);
    return std::sqrt(ss / (static_cast<double>(v.size()) - 1.0) /
                     static_cast<double>(v.size()));
  }
  template <typename T>
  static double quantile_of(std::vector<T> v, double q) {
    std::sort(v.begin(), v.end());
    const auto idx = static_cast<std::size_t>(q * static_cast<double>(v.size() - 1));
    return static_cast<double>(v[idx]);
  }
};

inline BridgeStats ensemble_stats(const std::vector<Trajectory>& trajectories,
                                  double acceptance_rate = 1.0) {
  BridgeStats st;
  st.acceptance_rate = acceptance_rate;
  st.max_d.reserve(trajectories.size());
  for (const auto& tr : trajectories) {
    if (!tr.final_state().is_origin() || !tr.initial.is_origin()) {
      throw std::invalid_argument("ensemble_stats: input is not an O -> O bridge");
    }
    const TrajectoryStats s = trajectory_stats(tr);
    st.max_d.push_back(s.max_d);
    st.max_m.push_back(s.max_m);
    std::array<Site, 5> pk{};
    for (std::int32_t k = 1; k <= 5; ++k) pk[static_cast<std::size_t>(k - 1)] = s.particle_max(k);
    st.particle_max.push_back(pk);
  }
  return st;
}

enum class ScalingModel : std::uint8_t { LogT, Linear };

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Ordinary least squares of y against log t (LogT) or t (Linear).
inline ScalingFit scaling_fit(const std::vector<std::pair<double, double>>& points,
                              ScalingModel model) {
  if (points.size() < 3) throw std::invalid_argument("scaling_fit: need at least 3 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(points.size());
  for (auto [t, y] : points) {
    const double x = model == ScalingModel::LogT ? std::log(t) : t;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  if (!(std::abs(denom) > 1e-12 * (n * sxx + sx * sx + 1e-300))) {
    throw std::invalid_argument("scaling_fit: degenerate abscissae");
  }
  ScalingFit f;
  f.slope = (n * sxy - sx * sy) / denom;
  f.intercept = (sy - f.slope * sx) / n;
  return f;
}

}  // namespace tube
