#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tube {

using Part = std::int32_t;
using Site = std::int32_t;

enum class Direction : std::uint8_t { Right, Left };

/// One attempted jump: particle k (1-based, counted from the right) moves
/// one site right or left.
struct Move {
  Direction direction;
  std::int32_t particle;

  friend bool operator==(const Move&, const Move&) = default;
};

struct ConfigStats {
  std::int64_t distance;    // D, graph distance from the origin
  Site front;               // M, position of the rightmost particle (-1 at O)
  std::int32_t left_jumps;  // J, leftward jumps available
  std::int64_t s_plus;      // sum of occupied positive sites
  std::int64_t s_minus;     // sum of |site| over empty negative sites
};

/// A state of the process, stored as its displacement sequence: part k is
/// how far the k-th rightmost particle has travelled from its initial site
/// -k. The sequence is nonincreasing with positive entries; the empty
/// sequence is the origin. Values are immutable once constructed.
class Configuration {
 public:
  Configuration() = default;

  explicit Configuration(std::vector<Part> parts) : parts_(std::move(parts)) {
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      if (parts_[i] <= 0) {
        throw std::invalid_argument("configuration part " + std::to_string(i + 1) +
                                    " is " + std::to_string(parts_[i]) +
                                    "; parts must be positive");
      }
      if (i > 0 && parts_[i] > parts_[i - 1]) {
        throw std::invalid_argument(
            "configuration parts increase at index " + std::to_string(i + 1) + " (" +
            std::to_string(parts_[i - 1]) + " < " + std::to_string(parts_[i]) + ")");
      }
    }
  }

  /// Fast path for callers that maintain the invariant themselves.
  static Configuration unchecked(std::vector<Part> parts) {
    Configuration c;
    c.parts_ = std::move(parts);
    return c;
  }

  const std::vector<Part>& parts() const { return parts_; }
  std::span<const Part> span() const { return parts_; }
  bool is_origin() const { return parts_.empty(); }
  std::int32_t particle_count() const { return static_cast<std::int32_t>(parts_.size()); }

  /// B^(k); zero beyond the displaced particles.
  Part displacement(std::int32_t k) const {
    return (k >= 1 && k <= particle_count()) ? parts_[k - 1] : 0;
  }

  /// Current site of particle k.
  Site position(std::int32_t k) const { return displacement(k) - k; }

  std::int64_t distance() const {
    std::int64_t d = 0;
    for (Part b : parts_) d += b;
    return d;
  }

  friend bool operator==(const Configuration& a, const Configuration& b) {
    return a.parts_ == b.parts_;
  }

 private:
  std::vector<Part> parts_;
};

inline Configuration origin() { return Configuration{}; }

/// Legal move indices for a displacement sequence: rights are the first
/// index of each run of equal parts plus the next fresh particle, lefts the
/// last index of each run. Both lists come out in ascending particle order.
inline void legal_move_indices(std::span<const Part> parts, std::vector<std::int32_t>& rights,
                               std::vector<std::int32_t>& lefts) {
  rights.clear();
  lefts.clear();
  const auto m = static_cast<std::int32_t>(parts.size());
  for (std::int32_t k = 1; k <= m; ++k) {
    if (k == 1 || parts[k - 1] < parts[k - 2]) rights.push_back(k);
    if (k == m || parts[k - 1] > parts[k]) lefts.push_back(k);
  }
  rights.push_back(m + 1);  // a fresh particle can always start moving
}

inline ConfigStats config_stats(const Configuration& x) {
  ConfigStats s{};
  const auto& parts = x.parts();
  const auto m = static_cast<std::int32_t>(parts.size());
  s.front = m == 0 ? -1 : parts[0] - 1;
  for (std::int32_t k = 1; k <= m; ++k) {
    const Part b = parts[k - 1];
    s.distance += b;
    if (b > k) s.s_plus += b - k;
    s.s_minus += std::min<std::int64_t>(b, k);
    if (k == m || b > parts[k]) ++s.left_jumps;  // run ends here
  }
  return s;
}

inline bool is_legal(const Configuration& x, Move m) {
  if (m.particle < 1) return false;
  const std::int32_t k = m.particle;
  if (m.direction == Direction::Right) {
    if (k > x.particle_count() + 1) return false;
    return k == 1 || x.displacement(k) < x.displacement(k - 1);
  }
  return k <= x.particle_count() && x.displacement(k) > x.displacement(k + 1);
}

/// All legal moves, ordered by particle index with Right before Left.
inline std::vector<Move> enumerate_moves(const Configuration& x) {
  std::vector<std::int32_t> rights, lefts;
  legal_move_indices(x.span(), rights, lefts);
  std::vector<Move> moves;
  moves.reserve(rights.size() + lefts.size());
  std::size_t ri = 0, li = 0;
  while (ri < rights.size() || li < lefts.size()) {
    if (li == lefts.size() ||
        (ri < rights.size() && rights[ri] <= lefts[li])) {
      moves.push_back({Direction::Right, rights[ri++]});
    } else {
      moves.push_back({Direction::Left, lefts[li++]});
    }
  }
  return moves;
}

/// In-place move application for simulation loops; assumes legality.
inline void apply_move_unchecked(std::vector<Part>& parts, Move m) {
  const auto k = static_cast<std::size_t>(m.particle);
  if (m.direction == Direction::Right) {
    if (k == parts.size() + 1) {
      parts.push_back(1);
    } else {
      ++parts[k - 1];
    }
  } else {
    if (--parts[k - 1] == 0) parts.pop_back();
  }
}

inline Configuration apply_move(const Configuration& x, Move m) {
  if (!is_legal(x, m)) {
    const char* dir = m.direction == Direction::Right ? "right" : "left";
    throw std::invalid_argument("illegal " + std::string(dir) + " move for particle " +
                                std::to_string(m.particle) +
                                ": destination site is blocked or particle absent");
  }
  std::vector<Part> parts = x.parts();
  apply_move_unchecked(parts, m);
  return Configuration::unchecked(std::move(parts));
}

/// Componentwise order on displacement sequences; true iff y <= x, i.e.
/// every particle of y is no further right than its counterpart in x.
inline bool dominates(const Configuration& x, const Configuration& y) {
  if (y.particle_count() > x.particle_count()) return false;
  const auto& xp = x.parts();
  const auto& yp = y.parts();
  for (std::size_t i = 0; i < yp.size(); ++i) {
    if (xp[i] < yp[i]) return false;
  }
  return true;
}

/// Occupancy view over [lo, hi): 1 = occupied. Sites left of all displaced
/// material are occupied, sites right of the front empty.
inline std::vector<std::uint8_t> to_occupancy(const Configuration& x, Site lo, Site hi) {
  if (lo > hi) throw std::invalid_argument("to_occupancy: lo > hi");
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(hi - lo), 0);
  const auto m = x.particle_count();
  for (Site s = lo; s < hi; ++s) {
    bool occ;
    if (s < -m) {
      occ = true;  // packed region: every site -k for k > m is occupied
    } else {
      occ = false;
      for (std::int32_t k = 1; k <= m; ++k) {
        if (x.position(k) == s) {
          occ = true;
          break;
        }
      }
    }
    bits[static_cast<std::size_t>(s - lo)] = occ ? 1 : 0;
  }
  return bits;
}

/// Inverse of to_occupancy under the step extension (all-1 left of the
/// window, all-0 right of it). Rejects windows whose particle surplus
/// N+ - N- is nonzero, since no reachable state matches them.
inline Configuration from_occupancy(std::span<const std::uint8_t> bits, Site offset) {
  const auto len = static_cast<Site>(bits.size());
  std::int64_t n_plus = offset > 0 ? offset : 0;  // packed sites 0..offset-1
  std::int64_t n_minus = offset + len < 0 ? -(offset + len) : 0;  // holes right of window
  for (Site i = 0; i < len; ++i) {
    const Site s = offset + i;
    if (s >= 0 && bits[static_cast<std::size_t>(i)]) ++n_plus;
    if (s < 0 && !bits[static_cast<std::size_t>(i)]) ++n_minus;
  }
  if (n_plus != n_minus) {
    throw std::invalid_argument("occupancy window is not a reachable state: N+ - N- = " +
                                std::to_string(n_plus - n_minus));
  }
  std::vector<Part> parts;
  std::int32_t k = 0;
  // walk particles right-to-left: in-window occupied sites, then the packed
  // region below the window; stop once displacements reach zero.
  for (Site i = len - 1; i >= 0; --i) {
    if (!bits[static_cast<std::size_t>(i)]) continue;
    ++k;
    const Part b = static_cast<Part>(offset + i + k);
    if (b < 0) {
      throw std::invalid_argument("occupancy window is not step-extendable at site " +
                                  std::to_string(offset + i));
    }
    if (b == 0) return Configuration::unchecked(std::move(parts));
    parts.push_back(b);
  }
  for (Site s = offset - 1;; --s) {  // packed extension
    ++k;
    const Part b = static_cast<Part>(s + k);
    if (b <= 0) break;
    parts.push_back(b);
  }
  return Configuration::unchecked(std::move(parts));
}

}  // namespace tube
