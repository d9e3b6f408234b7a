#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "oracles.hpp"
#include "tube/config.hpp"
#include "tube/partitions.hpp"
#include "tube/rng.hpp"
#include "tube/state_space.hpp"

using namespace tube;

TEST(Configuration, OriginAndValidation) {
  EXPECT_TRUE(origin().is_origin());
  EXPECT_EQ(origin().distance(), 0);
  EXPECT_NO_THROW(Configuration({2, 1}));
  EXPECT_THROW(Configuration({1, 2}), std::invalid_argument);
  EXPECT_THROW(Configuration({2, 0}), std::invalid_argument);
  EXPECT_THROW(Configuration({-1}), std::invalid_argument);
}

TEST(Configuration, OccupancyOfTwoOne) {
  // particles of [2,1] sit at {1, -1, -3, -4, ...}
  const Configuration x({2, 1});
  EXPECT_EQ(x.position(1), 1);
  EXPECT_EQ(x.position(2), -1);
  EXPECT_EQ(x.position(3), -3);
  EXPECT_EQ(x.position(4), -4);
}

TEST(ConfigStats, AgainstOccupancyOracle) {
  const std::vector<std::vector<int>> cases = {{}, {2, 1}, {5}, {1, 1}, {3, 2, 2, 1}, {7, 1, 1}};
  for (const auto& parts : cases) {
    const auto want = oracle::stats_from_occupancy(parts);
    const Configuration x(std::vector<Part>(parts.begin(), parts.end()));
    const ConfigStats got = config_stats(x);
    EXPECT_EQ(got.distance, want.d) << "parts size " << parts.size();
    EXPECT_EQ(got.front, want.m);
    EXPECT_EQ(got.left_jumps, want.j);
    EXPECT_EQ(got.s_plus, want.s_plus);
    EXPECT_EQ(got.s_minus, want.s_minus);
  }
}

TEST(ConfigStats, SpecValues) {
  const ConfigStats o = config_stats(origin());
  EXPECT_EQ(o.distance, 0);
  EXPECT_EQ(o.front, -1);
  EXPECT_EQ(o.left_jumps, 0);
  EXPECT_EQ(o.s_plus, 0);
  EXPECT_EQ(o.s_minus, 0);

  const ConfigStats a = config_stats(Configuration({2, 1}));
  EXPECT_EQ(a.distance, 3);
  EXPECT_EQ(a.front, 1);
  EXPECT_EQ(a.left_jumps, 2);
  EXPECT_EQ(a.s_plus, 1);
  EXPECT_EQ(a.s_minus, 2);

  const ConfigStats b = config_stats(Configuration({5}));
  EXPECT_EQ(b.distance, 5);
  EXPECT_EQ(b.front, 4);
  EXPECT_EQ(b.left_jumps, 1);
}

TEST(Occupancy, RoundTripAndWindows) {
  EXPECT_EQ(to_occupancy(origin(), -2, 2), (std::vector<std::uint8_t>{1, 1, 0, 0}));
  EXPECT_EQ(to_occupancy(Configuration({2, 1}), -4, 2),
            (std::vector<std::uint8_t>{1, 1, 0, 1, 0, 1}));
  EXPECT_EQ(to_occupancy(Configuration({1}), -1, 1), (std::vector<std::uint8_t>{0, 1}));

  EXPECT_TRUE(from_occupancy(std::vector<std::uint8_t>{1, 1, 0, 0}, -2).is_origin());
  EXPECT_EQ(from_occupancy(std::vector<std::uint8_t>{0, 1}, -1), Configuration({1}));
  // balanced window below the origin is a legitimate state
  EXPECT_EQ(from_occupancy(std::vector<std::uint8_t>{0, 0, 1, 1}, -2), Configuration({2, 2}));
  // unbalanced windows are not reachable states
  EXPECT_THROW(from_occupancy(std::vector<std::uint8_t>{0, 0, 1, 1}, 0), std::invalid_argument);
  EXPECT_THROW(from_occupancy(std::vector<std::uint8_t>{1, 1, 0, 0}, 0), std::invalid_argument);
}

TEST(Occupancy, RoundTripRandom) {
  RngEngine eng({2024, 1});
  for (int trial = 0; trial < 200; ++trial) {
    const Configuration x(oracle::random_parts(eng, 40));
    const ConfigStats st = config_stats(x);
    const Site lo = static_cast<Site>(-(st.s_minus + x.particle_count() + 3));
    const Site hi = static_cast<Site>(st.front + 3);
    const auto bits = to_occupancy(x, lo, hi);
    EXPECT_EQ(from_occupancy(bits, lo), x);
  }
}

TEST(Moves, EnumerationMatchesSpec) {
  // origin: only the fresh particle may start
  const auto from_o = enumerate_moves(origin());
  ASSERT_EQ(from_o.size(), 1u);
  EXPECT_EQ(from_o[0], (Move{Direction::Right, 1}));

  auto directions = [](const std::vector<Move>& ms, Direction d) {
    std::set<int> ks;
    for (const Move& m : ms) {
      if (m.direction == d) ks.insert(m.particle);
    }
    return ks;
  };
  const auto m21 = enumerate_moves(Configuration({2, 1}));
  EXPECT_EQ(directions(m21, Direction::Right), (std::set<int>{1, 2, 3}));
  EXPECT_EQ(directions(m21, Direction::Left), (std::set<int>{1, 2}));

  const auto m11 = enumerate_moves(Configuration({1, 1}));
  EXPECT_EQ(directions(m11, Direction::Right), (std::set<int>{1, 3}));
  EXPECT_EQ(directions(m11, Direction::Left), (std::set<int>{2}));
}

TEST(Moves, BruteForceLegalityOnRandomStates) {
  RngEngine eng({7, 7});
  for (int trial = 0; trial < 300; ++trial) {
    const Configuration x(oracle::random_parts(eng, 25));
    const auto moves = enumerate_moves(x);
    // every enumerated move is legal and applying it shifts D by one
    for (const Move& m : moves) {
      EXPECT_TRUE(is_legal(x, m));
      const Configuration y = apply_move(x, m);
      EXPECT_EQ(y.distance() - x.distance(), m.direction == Direction::Right ? 1 : -1);
    }
    // counts follow J
    const auto st = config_stats(x);
    const auto rights = static_cast<std::int64_t>(
        std::count_if(moves.begin(), moves.end(),
                      [](const Move& m) { return m.direction == Direction::Right; }));
    EXPECT_EQ(rights, st.left_jumps + 1);
    EXPECT_EQ(static_cast<std::int64_t>(moves.size()) - rights, st.left_jumps);
    // deterministic ordering: ascending particle, Right before Left
    for (std::size_t i = 1; i < moves.size(); ++i) {
      const bool earlier = moves[i - 1].particle < moves[i].particle ||
                           (moves[i - 1].particle == moves[i].particle &&
                            moves[i - 1].direction == Direction::Right);
      EXPECT_TRUE(earlier);
    }
    // no move enumerated twice, none missing vs brute force over k
    for (std::int32_t k = 1; k <= x.particle_count() + 2; ++k) {
      for (Direction d : {Direction::Right, Direction::Left}) {
        const bool listed = std::find(moves.begin(), moves.end(), Move{d, k}) != moves.end();
        EXPECT_EQ(listed, is_legal(x, {d, k}));
      }
    }
  }
}

TEST(Moves, ApplyAndErrors) {
  EXPECT_EQ(apply_move(origin(), {Direction::Right, 1}), Configuration({1}));
  EXPECT_EQ(apply_move(Configuration({2, 1}), {Direction::Left, 2}), Configuration({2}));
  EXPECT_THROW(apply_move(Configuration({1, 1}), {Direction::Left, 1}), std::invalid_argument);
  EXPECT_THROW(apply_move(origin(), {Direction::Left, 1}), std::invalid_argument);
}

TEST(Moves, InverseRoundTrip) {
  RngEngine eng({11, 3});
  for (int trial = 0; trial < 200; ++trial) {
    const Configuration x(oracle::random_parts(eng, 30));
    for (const Move& m : enumerate_moves(x)) {
      const Move inverse{m.direction == Direction::Right ? Direction::Left : Direction::Right,
                         m.particle};
      EXPECT_EQ(apply_move(apply_move(x, m), inverse), x);
    }
  }
}

TEST(Dominates, SpecCasesAndPartialOrder) {
  EXPECT_TRUE(dominates(Configuration({3, 1}), origin()));
  EXPECT_TRUE(dominates(origin(), origin()));
  EXPECT_TRUE(dominates(Configuration({2, 1}), Configuration({1, 1})));
  EXPECT_FALSE(dominates(Configuration({2}), Configuration({1, 1})));

  RngEngine eng({5, 9});
  for (int trial = 0; trial < 300; ++trial) {
    const Configuration a(oracle::random_parts(eng, 15));
    const Configuration b(oracle::random_parts(eng, 15));
    const Configuration c(oracle::random_parts(eng, 15));
    EXPECT_TRUE(dominates(a, a));
    if (dominates(a, b) && dominates(b, a)) EXPECT_EQ(a, b);
    if (dominates(a, b) && dominates(b, c)) EXPECT_TRUE(dominates(a, c));
    EXPECT_TRUE(dominates(a, origin()));
  }
}

TEST(Partitions, SmallValuesAgainstBruteForce) {
  for (int n = 0; n <= 30; ++n) {
    EXPECT_EQ(partition_count(n), BigInt(oracle::count_partitions_brute(n))) << "n=" << n;
  }
  EXPECT_EQ(partition_count(0), BigInt(1));
  EXPECT_EQ(partition_count(5), BigInt(7));
}

TEST(Partitions, LargeValueExactArithmetic) {
  // p(500) needs ~71 bits; the recurrence must not overflow
  EXPECT_EQ(partition_count(500), BigInt("2300165032574323995027"));
}

TEST(Partitions, HardyRamanujanRatio) {
  const double r1 = hardy_ramanujan(1);
  EXPECT_NEAR(r1, std::exp(std::numbers::pi * std::sqrt(2.0 / 3.0)) / (4.0 * std::sqrt(3.0)),
              1e-15);
  const double ratio50 =
      hardy_ramanujan(50) / static_cast<double>(partition_count(50).convert_to<double>());
  const double ratio500 =
      hardy_ramanujan(500) / static_cast<double>(partition_count(500).convert_to<double>());
  EXPECT_GT(ratio500, 0.9);
  EXPECT_LT(ratio500, 1.1);
  EXPECT_LT(std::abs(ratio500 - 1.0), std::abs(ratio50 - 1.0));
}

TEST(StateSpace, BijectionWithPartitions) {
  // shell sizes must match the partition function for every n <= 30... the
  // space at N=30 is ~28k states, cheap to enumerate.
  StateSpace space(30);
  std::vector<std::int64_t> shell(31, 0);
  for (std::uint32_t i = 0; i < space.size(); ++i) shell[space.distance_of(i)]++;
  const auto table = partition_table(30);
  for (int n = 0; n <= 30; ++n) {
    EXPECT_EQ(BigInt(shell[n]), table[n]) << "n=" << n;
  }
}

TEST(CoreInvariants, RandomConfigurations) {
  RngEngine eng({123, 0});
  for (int trial = 0; trial < 10'000; ++trial) {
    const Configuration x(oracle::random_parts(eng, 200));
    const ConfigStats st = config_stats(x);
    EXPECT_LE(st.left_jumps, st.front + 1);
    EXPECT_LE(static_cast<double>(st.left_jumps), std::sqrt(2.0 * st.distance) + 1e-12);
    EXPECT_EQ(st.distance, st.s_plus + st.s_minus);
  }
}
