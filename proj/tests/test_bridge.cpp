#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "tube/bridge.hpp"
#include "tube/measures.hpp"
#include "tube/parallel.hpp"
#include "tube/solver.hpp"
#include "tube/stat_tests.hpp"

using namespace tube;

TEST(Reverse, SpecExampleAndInvolution) {
  EXPECT_TRUE(reverse({origin(), {}, 1.0}).events.empty());

  Trajectory tr{origin(),
                {{0.3, {Direction::Right, 1}}, {0.9, {Direction::Left, 1}}},
                1.0};
  const Trajectory rev = reverse(tr);
  ASSERT_EQ(rev.events.size(), 2u);
  EXPECT_NEAR(rev.events[0].time, 0.1, 1e-15);
  EXPECT_EQ(rev.events[0].move, (Move{Direction::Right, 1}));
  EXPECT_NEAR(rev.events[1].time, 0.7, 1e-15);
  EXPECT_EQ(rev.events[1].move, (Move{Direction::Left, 1}));

  // non-returning trajectories are rejected
  Trajectory open_path{origin(), {{0.5, {Direction::Right, 1}}}, 1.0};
  EXPECT_THROW(reverse(open_path), std::invalid_argument);

  // involution on sampled bridges
  int checked = 0;
  for (std::uint64_t i = 0; i < 2000 && checked < 1000; ++i) {
    const RejectionOutcome out = sample_bridge_rejection(0.35, 3.0, {50, i}, 100000);
    ASSERT_TRUE(out.trajectory.has_value());
    const Trajectory& b = *out.trajectory;
    const Trajectory rr = reverse(reverse(b));
    ASSERT_EQ(rr.events.size(), b.events.size());
    for (std::size_t e = 0; e < b.events.size(); ++e) {
      // t - (t - s) re-rounds, so the involution holds to a few ulps
      EXPECT_NEAR(rr.events[e].time, b.events[e].time, 1e-12);
      EXPECT_EQ(rr.events[e].move, b.events[e].move);
    }
    // reversal preserves the visited state multiset, hence max_D and weight
    const TrajectoryStats sa = trajectory_stats(b);
    const TrajectoryStats sb = trajectory_stats(reverse(b));
    EXPECT_EQ(sa.max_d, sb.max_d);
    EXPECT_NEAR(log_path_weight(b, 0.35), log_path_weight(reverse(b), 0.35), 1e-9);
    ++checked;
  }
  EXPECT_GE(checked, 1000);
}

TEST(RejectionSampler, ZeroHorizonAcceptsImmediately) {
  const RejectionOutcome out = sample_bridge_rejection(0.5, 0.0, {1, 1});
  ASSERT_TRUE(out.trajectory.has_value());
  EXPECT_EQ(out.attempts, 1u);
  EXPECT_TRUE(out.trajectory->events.empty());
}

TEST(RejectionSampler, CapFailureIsAResult) {
  // p = 0.5 at t = 60: acceptance is far below 1/20
  const RejectionOutcome out = sample_bridge_rejection(0.5, 60.0, {2, 2}, 20);
  EXPECT_FALSE(out.trajectory.has_value());
  EXPECT_EQ(out.attempts, 20u);
}

TEST(RejectionSampler, AcceptanceMatchesExactReturnProbability) {
  // p = 0.5, t = 9: acceptance within 3 SE of the certified return probability
  StateSpace s(32);
  const auto exact = return_probability_certified(s, build_generator(s, 0.5), 9.0);
  ASSERT_LT(exact.defect, 1e-6);
  const int n = 4000;
  std::vector<double> accepted(n);
  parallel_for(n, [&](std::uint64_t i) {
    const Trajectory tr = gillespie(origin(), 0.5, 9.0, {71, i});
    accepted[i] = tr.final_state().is_origin() ? 1.0 : 0.0;
  });
  EXPECT_NEAR(mean(accepted), exact.value, 3.0 * standard_error(accepted));
}

TEST(RejectionSampler, AcceptanceTendsToAlpha) {
  // p = 0.3, t = 100: P(X_t = O) ~ alpha(0.3)
  const double a = alpha(0.3);
  const int n = 3000;
  std::vector<double> accepted(n);
  parallel_for(n, [&](std::uint64_t i) {
    const Trajectory tr = gillespie(origin(), 0.3, 100.0, {72, i});
    accepted[i] = tr.final_state().is_origin() ? 1.0 : 0.0;
  });
  EXPECT_NEAR(mean(accepted), a, 3.0 * standard_error(accepted));
}

TEST(SampleBridge, DualityRequiresDriftRight) {
  BridgeRequest req;
  req.p = 0.5;
  req.method = BridgeMethod::Duality;
  EXPECT_THROW(sample_bridge(req), std::invalid_argument);
}

TEST(SampleBridge, EverySamplerOutputIsABridge) {
  for (BridgeMethod method :
       {BridgeMethod::Rejection, BridgeMethod::Duality, BridgeMethod::HTransform}) {
    BridgeRequest req;
    req.p = method == BridgeMethod::Duality ? 0.7 : 0.45;
    if (method == BridgeMethod::HTransform) req.p = 0.5;
    req.t = 3.0;
    req.method = method;
    req.truncate = 14;
    req.samples = 200;
    req.stream = {2025, 0};
    const BridgeEnsemble ens = sample_bridge(req);
    ASSERT_EQ(ens.trajectories.size(), 200u);
    for (const Trajectory& tr : ens.trajectories) {
      EXPECT_TRUE(tr.final_state().is_origin());
      EXPECT_TRUE(tr.initial.is_origin());
      double prev = 0.0;
      for (const Event& e : tr.events) {
        EXPECT_GT(e.time, prev);
        EXPECT_LE(e.time, tr.horizon);
        prev = e.time;
      }
      // replay validates every intermediate move
      EXPECT_NO_THROW(trajectory_stats(tr));
    }
  }
}

TEST(HTransform, EmptyPathFrequencyAtTinyHorizon) {
  // the bridge at t = 0.01 is empty unless two events squeeze in: the
  // conditional probability is exactly e^{-pt} / P(X_t = O, stay)
  const double p = 0.5, t = 0.01;
  HTransformSampler sampler(p, t, 4);
  const int n = 10000;
  std::vector<double> empty_path(n);
  parallel_for(n, [&](std::uint64_t i) {
    empty_path[i] = sampler.sample({91, i}).events.empty() ? 1.0 : 0.0;
  });
  const double expected = std::exp(-p * t) / sampler.endpoint_probability();
  EXPECT_NEAR(expected, 1.0, 1e-4);  // dominant-path scale check
  EXPECT_NEAR(mean(empty_path), expected, 3.0 * standard_error(empty_path) + 1e-4);
}

TEST(HTransform, EndpointProbabilityMatchesSolver) {
  for (double p : {0.5, 0.65}) {
    StateSpace s(12);
    const double t = 2.5;
    const double direct = return_probability(s, build_generator(s, p), t, 1e-13);
    HTransformSampler sampler(p, t, 12);
    EXPECT_NEAR(sampler.endpoint_probability(), direct, 1e-11);
  }
}

TEST(HTransform, MarginalMatchesExactBridge) {
  // distribution of X_{t/2} under 10^4 sampled bridges vs bridge_marginal
  const double p = 0.5, t = 4.0;
  const std::int32_t n_trunc = 20;
  HTransformSampler sampler(p, t, n_trunc);
  StateSpace space(n_trunc);
  const RateMatrix q = build_generator(space, p);
  const DistVector marg = bridge_marginal(space, q, t, t / 2.0, 1e-13);

  const int n = 10000;
  std::vector<std::uint32_t> state_at_mid(n);
  parallel_for(n, [&](std::uint64_t i) {
    const Trajectory tr = sampler.sample({92, i});
    std::vector<Part> parts = tr.initial.parts();
    for (const Event& e : tr.events) {
      if (e.time > t / 2.0) break;
      apply_move_unchecked(parts, e.move);
    }
    state_at_mid[i] = space.index_of(Configuration::unchecked(std::move(parts)));
  });
  std::vector<std::uint64_t> counts(space.size(), 0);
  for (auto sidx : state_at_mid) counts[sidx]++;
  const double pval = chi_squared_gof_pvalue(counts, marg.weights);
  EXPECT_GT(pval, 0.001);
}

TEST(HTransform, TimeReversalOfMaxDistance) {
  // max_D is pathwise invariant under reversal (same visited states), and
  // the paired first-half vs reversed-first-half maxima show no bias
  const double p = 0.5, t = 4.0;
  HTransformSampler sampler(p, t, 16);
  const int n = 4000;
  std::vector<double> half_diff(n);
  parallel_for(n, [&](std::uint64_t i) {
    const Trajectory tr = sampler.sample({93, i});
    const TrajectoryStats whole = trajectory_stats(tr);
    const TrajectoryStats rev = trajectory_stats(reverse(tr));
    if (whole.max_d != rev.max_d) throw std::logic_error("reversal changed max_D");
    auto half_max = [&](const Trajectory& tj) {
      std::int64_t d = 0, best = 0;
      for (const Event& e : tj.events) {
        if (e.time >= t / 2.0) break;
        d += e.move.direction == Direction::Right ? 1 : -1;
        best = std::max(best, d);
      }
      return best;
    };
    half_diff[i] = static_cast<double>(half_max(tr) - half_max(reverse(tr)));
  });
  EXPECT_LT(std::abs(mean(half_diff)), 3.0 * standard_error(half_diff) + 1e-12);
}

TEST(EnsembleStats, ValidatesAndAggregates) {
  std::vector<Trajectory> empties(3, Trajectory{origin(), {}, 1.0});
  const BridgeStats st = ensemble_stats(empties);
  ASSERT_EQ(st.max_d.size(), 3u);
  for (auto v : st.max_d) EXPECT_EQ(v, 0);
  for (auto v : st.max_m) EXPECT_EQ(v, -1);
  for (const auto& pk : st.particle_max) {
    for (std::int32_t k = 1; k <= 5; ++k) EXPECT_EQ(pk[static_cast<std::size_t>(k - 1)], -k);
  }

  Trajectory open_path{origin(), {{0.5, {Direction::Right, 1}}}, 1.0};
  EXPECT_THROW(ensemble_stats({open_path}), std::invalid_argument);
}

TEST(ScalingFit, ExactLinesAndErrors) {
  // y = 2 log t
  std::vector<std::pair<double, double>> pts;
  for (double t : {10.0, 20.0, 40.0, 80.0}) pts.emplace_back(t, 2.0 * std::log(t));
  const ScalingFit f = scaling_fit(pts, ScalingModel::LogT);
  EXPECT_NEAR(f.slope, 2.0, 1e-12);
  EXPECT_NEAR(f.intercept, 0.0, 1e-12);

  // constant data fits slope 0
  std::vector<std::pair<double, double>> flat{{1.0, 3.0}, {2.0, 3.0}, {3.0, 3.0}};
  EXPECT_NEAR(scaling_fit(flat, ScalingModel::Linear).slope, 0.0, 1e-12);

  EXPECT_THROW(scaling_fit({{1.0, 1.0}, {2.0, 2.0}}, ScalingModel::Linear),
               std::invalid_argument);
  std::vector<std::pair<double, double>> degenerate{{2.0, 1.0}, {2.0, 2.0}, {2.0, 3.0}};
  EXPECT_THROW(scaling_fit(degenerate, ScalingModel::Linear), std::invalid_argument);
}

TEST(DualityLaw, MaxDistributionsAgreeAcrossMethods) {
  // duality bridges at p = 0.7 vs direct rejection at p = 0.7, t = 2
  const double t = 2.0;
  BridgeRequest dual;
  dual.p = 0.7;
  dual.t = t;
  dual.method = BridgeMethod::Duality;
  dual.samples = 10000;
  dual.stream = {31337, 0};
  const BridgeEnsemble a = sample_bridge(dual);

  BridgeRequest direct = dual;
  direct.method = BridgeMethod::Rejection;
  direct.stream = {31338, 500000};
  const BridgeEnsemble b = sample_bridge(direct);

  auto histogram = [](const BridgeEnsemble& e) {
    std::vector<std::uint64_t> h(12, 0);
    for (const Trajectory& tr : e.trajectories) {
      const auto d = trajectory_stats(tr).max_d;
      h[static_cast<std::size_t>(std::min<std::int64_t>(d, 11))]++;
    }
    return h;
  };
  const double pval = chi_squared_two_sample_pvalue(histogram(a), histogram(b));
  EXPECT_GT(pval, 0.001);

  // mean max_M agrees within 3 pooled standard errors
  std::vector<double> ma, mb;
  for (const auto& tr : a.trajectories) ma.push_back(trajectory_stats(tr).max_m);
  for (const auto& tr : b.trajectories) mb.push_back(trajectory_stats(tr).max_m);
  const double se = std::sqrt(standard_error(ma) * standard_error(ma) +
                              standard_error(mb) * standard_error(mb));
  EXPECT_LT(std::abs(mean(ma) - mean(mb)), 3.0 * se);
}
