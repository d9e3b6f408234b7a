#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "tube/config.hpp"
#include "tube/state_space.hpp"

namespace tube {

/// What happens to a rightward jump that would leave {D <= N}.
///   Absorb:  the jump kills the chain (mass leaves; transient analysis).
///   Reflect: the jump is suppressed (honest chain; stationary analysis).
enum class Boundary : std::uint8_t { Absorb, Reflect };

/// Sparse generator of the truncated chain. Off-diagonal entries hold the
/// jump rates p and 1-p; the diagonal is -outflow, where outflow includes
/// the absorption rate at the boundary under Boundary::Absorb.
struct RateMatrix {
  double p = 0.5;
  Boundary boundary = Boundary::Absorb;
  double lambda = 1.0;  // uniformization constant, >= max outflow
  std::vector<std::uint64_t> row_ptr;
  std::vector<std::uint32_t> col;
  std::vector<double> rate;
  std::vector<double> outflow;

  std::size_t size() const { return outflow.size(); }
  std::uint64_t nonzeros() const { return col.size(); }
};

inline std::int32_t max_left_jumps(std::int32_t n) {
  // floor(sqrt(2N)), exact: J <= sqrt(2D) bounds the jump counts
  std::int64_t j = static_cast<std::int64_t>(std::sqrt(2.0 * n));
  while ((j + 1) * (j + 1) <= 2 * static_cast<std::int64_t>(n)) ++j;
  while (j > 0 && j * j > 2 * static_cast<std::int64_t>(n)) --j;
  return static_cast<std::int32_t>(j);
}

/// Uniformization constant for the truncated space.
inline double uniformization_rate(std::int32_t n, double p) {
  const std::int32_t jmax = max_left_jumps(n);
  return p * (jmax + 1) + (1.0 - p) * jmax;
}

inline RateMatrix build_generator(const StateSpace& space, double p,
                                  Boundary boundary = Boundary::Absorb) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("build_generator: p must lie in (0,1)");
  }
  const std::int32_t n = space.truncation();
  RateMatrix q;
  q.p = p;
  q.boundary = boundary;
  q.lambda = uniformization_rate(n, p);
  const std::size_t states = space.size();
  q.row_ptr.reserve(states + 1);
  q.row_ptr.push_back(0);
  q.outflow.resize(states, 0.0);

  std::vector<std::int32_t> rights, lefts;
  std::vector<Part> scratch;
  for (std::uint32_t i = 0; i < states; ++i) {
    const auto parts = space.parts_of(i);
    const bool at_boundary = space.distance_of(i) == n;
    legal_move_indices(parts, rights, lefts);
    double out = 0.0;
    for (std::int32_t k : rights) {
      if (at_boundary) {
        // every rightward jump from the shell D = N exits the space
        if (boundary == Boundary::Absorb) out += p;
        continue;
      }
      scratch.assign(parts.begin(), parts.end());
      apply_move_unchecked(scratch, {Direction::Right, k});
      const auto target = space.find(scratch);
      assert(target.has_value());
      q.col.push_back(*target);
      q.rate.push_back(p);
      out += p;
    }
    for (std::int32_t k : lefts) {
      scratch.assign(parts.begin(), parts.end());
      apply_move_unchecked(scratch, {Direction::Left, k});
      const auto target = space.find(scratch);
      assert(target.has_value());
      q.col.push_back(*target);
      q.rate.push_back(1.0 - p);
      out += 1.0 - p;
    }
    q.outflow[i] = out;
    q.row_ptr.push_back(q.col.size());
    assert(out <= q.lambda + 1e-9);
  }
  return q;
}

}  // namespace tube
