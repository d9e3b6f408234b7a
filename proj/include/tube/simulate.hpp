#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tube/config.hpp"
#include "tube/rng.hpp"
#include "tube/trajectory.hpp"

namespace tube {

/// Event-driven exact simulation from `init` up to t_end. Holding times are
/// exponential with the full outflow rate p(J+1) + (1-p)J; the move is
/// picked proportionally to its rate. Bit-reproducible given the stream.
inline Trajectory gillespie(const Configuration& init, double p, double t_end,
                            RngStream stream) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("gillespie: p in (0,1)");
  if (t_end < 0.0) throw std::invalid_argument("gillespie: t_end >= 0");
  RngEngine eng(stream);
  Trajectory tr;
  tr.initial = init;
  tr.horizon = t_end;
  std::vector<Part> parts = init.parts();
  std::vector<std::int32_t> rights, lefts;
  double time = 0.0;
  for (;;) {
    legal_move_indices(parts, rights, lefts);
    const double total = p * static_cast<double>(rights.size()) +
                         (1.0 - p) * static_cast<double>(lefts.size());
    time += eng.exponential(total);
    if (time >= t_end) break;
    Move move{};
    const double u = eng.u01() * total;
    if (u < p * static_cast<double>(rights.size())) {
      move = {Direction::Right, rights[eng.below(rights.size())]};
    } else {
      move = {Direction::Left, lefts[eng.below(lefts.size())]};
    }
    apply_move_unchecked(parts, move);
    tr.events.push_back({time, move});
  }
  return tr;
}

namespace detail {

/// Occupancy window with the particle index stored per occupied site.
/// Exclusion dynamics never reorder particles, so an index is stable for
/// the whole run.
class Lattice {
 public:
  void init(const Configuration& x, Site lo, Site hi) {
    lo_ = lo;
    occ_.assign(static_cast<std::size_t>(hi - lo), 0);
    pidx_.assign(occ_.size(), 0);
    parts_ = x.parts();
    const auto m = x.particle_count();
    for (std::int32_t k = 1;; ++k) {
      const Site pos = k <= m ? x.position(k) : -k;
      if (pos < lo) break;
      if (pos < hi) set(pos, k);
    }
  }

  Site lo() const { return lo_; }
  Site hi() const { return lo_ + static_cast<Site>(occ_.size()); }
  Site width() const { return static_cast<Site>(occ_.size()); }
  bool occupied(Site s) const { return occ_[static_cast<std::size_t>(s - lo_)] != 0; }
  std::int32_t particle_at(Site s) const { return pidx_[static_cast<std::size_t>(s - lo_)]; }
  const std::vector<Part>& parts() const { return parts_; }

  /// Attempts to move the content of `from` one step in `dir`; returns the
  /// exclusion move if a particle actually jumped.
  std::optional<Move> attempt(Site from, Direction dir) {
    const Site to = dir == Direction::Right ? from + 1 : from - 1;
    if (from < lo_ || from >= hi() || to < lo_ || to >= hi()) return std::nullopt;
    if (!occupied(from) || occupied(to)) return std::nullopt;
    const std::int32_t k = particle_at(from);
    const Move move{dir, k};
    apply_move_unchecked(parts_, move);
    clear(from);
    set(to, k);
    return move;
  }

  /// Extends the window left (sites packed, indices continue downward) or
  /// right (sites empty).
  void grow_left(Site count) {
    std::int32_t k = occupied_count();
    std::vector<std::uint8_t> occ(occ_.size() + static_cast<std::size_t>(count));
    std::vector<std::int32_t> pidx(occ.size());
    for (Site i = 0; i < count; ++i) {
      occ[static_cast<std::size_t>(i)] = 1;
      pidx[static_cast<std::size_t>(i)] = k + static_cast<std::int32_t>(count - i);
    }
    std::copy(occ_.begin(), occ_.end(), occ.begin() + count);
    std::copy(pidx_.begin(), pidx_.end(), pidx.begin() + count);
    occ_ = std::move(occ);
    pidx_ = std::move(pidx);
    lo_ -= count;
  }

  void grow_right(Site count) {
    occ_.resize(occ_.size() + static_cast<std::size_t>(count), 0);
    pidx_.resize(occ_.size(), 0);
  }

  std::int32_t occupied_count() const {
    std::int32_t n = 0;
    for (auto b : occ_) n += b;
    return n;
  }

 private:
  void set(Site s, std::int32_t k) {
    occ_[static_cast<std::size_t>(s - lo_)] = 1;
    pidx_[static_cast<std::size_t>(s - lo_)] = k;
  }
  void clear(Site s) {
    occ_[static_cast<std::size_t>(s - lo_)] = 0;
    pidx_[static_cast<std::size_t>(s - lo_)] = 0;
  }

  Site lo_ = 0;
  std::vector<std::uint8_t> occ_;
  std::vector<std::int32_t> pidx_;
  std::vector<Part> parts_;
};

inline Site initial_window_lo(const Configuration& x) {
  const ConfigStats s = config_stats(x);
  return static_cast<Site>(-(s.s_minus + 1));  // deepest hole is at >= -S^-
}

}  // namespace detail

/// Basic coupling: both processes driven by one family of per-site Poisson
/// jump-attempt clocks (rate p rightward, 1-p leftward per site). Each
/// marginal is an exact exclusion process; the window grows on demand so no
/// approximation ever enters.
inline std::pair<Trajectory, Trajectory> coupled_pair(const Configuration& x,
                                                      const Configuration& x_tilde, double p,
                                                      double t_end, RngStream stream) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("coupled_pair: p in (0,1)");
  RngEngine eng(stream);
  constexpr Site kSlack = 8;
  constexpr Site kMargin = 2;
  const Site lo = std::min(detail::initial_window_lo(x), detail::initial_window_lo(x_tilde)) - kSlack;
  const Site hi = std::max({config_stats(x).front, config_stats(x_tilde).front, Site{0}}) + 1 + kSlack;

  detail::Lattice a, b;
  a.init(x, lo, hi);
  b.init(x_tilde, lo, hi);
  Trajectory ta{x, {}, t_end}, tb{x_tilde, {}, t_end};

  double time = 0.0;
  for (;;) {
    const double width = static_cast<double>(a.width());
    time += eng.exponential(width);  // p + (1-p) = 1 per site
    if (time >= t_end) break;
    const Site site = a.lo() + static_cast<Site>(eng.below(static_cast<std::uint64_t>(a.width())));
    const Direction dir = eng.bernoulli(p) ? Direction::Right : Direction::Left;
    bool near_edge = false;
    if (auto mv = a.attempt(site, dir)) {
      ta.events.push_back({time, *mv});
      near_edge |= site <= a.lo() + kMargin || site >= a.hi() - 1 - kMargin;
    }
    if (auto mv = b.attempt(site, dir)) {
      tb.events.push_back({time, *mv});
      near_edge |= site <= b.lo() + kMargin || site >= b.hi() - 1 - kMargin;
    }
    if (near_edge) {
      const Site growth = a.width();
      if (site <= a.lo() + kMargin) {
        a.grow_left(growth);
        b.grow_left(growth);
      } else {
        a.grow_right(growth);
        b.grow_right(growth);
      }
    }
  }
  return {std::move(ta), std::move(tb)};
}

struct TaggedWalk {
  Site start;
  Site end;
};

struct StirringResult {
  Trajectory trajectory;
  std::vector<TaggedWalk> walks;  // labelled particles initially in the window
};

/// Stirring representation of the symmetric process: each edge swaps its
/// contents at rate 1/2. The occupancy process is the p = 1/2 exclusion
/// process; labelled particles perform (negatively dependent) symmetric
/// walks, tracked for every particle initially inside the window.
inline StirringResult stirring(const Configuration& init, double t_end, Site window_lo,
                               Site window_hi, RngStream stream, double p = 0.5) {
  if (p != 0.5) throw std::invalid_argument("stirring is defined for p = 1/2 only");
  if (window_lo >= window_hi) throw std::invalid_argument("stirring: empty window");
  RngEngine eng(stream);
  constexpr Site kMargin = 2;
  Site lo = std::min(window_lo, static_cast<Site>(detail::initial_window_lo(init) - 2));
  Site hi = std::max(window_hi, static_cast<Site>(config_stats(init).front + 2));

  detail::Lattice lat;
  lat.init(init, lo, hi);
  // labels: one per initially occupied site; walks indexed by label
  std::vector<std::int32_t> label(static_cast<std::size_t>(hi - lo), -1);
  std::vector<TaggedWalk> walks;
  std::vector<Site> pos_of;
  for (Site s = lo; s < hi; ++s) {
    if (lat.occupied(s)) {
      label[static_cast<std::size_t>(s - lo)] = static_cast<std::int32_t>(walks.size());
      walks.push_back({s, s});
      pos_of.push_back(s);
    }
  }
  auto grow = [&](bool left) {
    const Site growth = hi - lo;
    if (left) {
      lat.grow_left(growth);
      label.insert(label.begin(), static_cast<std::size_t>(growth), -1);
      lo -= growth;
    } else {
      lat.grow_right(growth);
      label.insert(label.end(), static_cast<std::size_t>(growth), -1);
      hi += growth;
    }
  };

  Trajectory tr{init, {}, t_end};
  double time = 0.0;
  for (;;) {
    const double rate = 0.5 * static_cast<double>(hi - lo - 1);
    time += eng.exponential(rate);
    if (time >= t_end) break;
    const Site e = lo + static_cast<Site>(eng.below(static_cast<std::uint64_t>(hi - lo - 1)));
    // swap contents of e and e+1
    const bool occ_l = lat.occupied(e), occ_r = lat.occupied(e + 1);
    bool touched_edge = false;
    if (occ_l != occ_r) {
      const Direction dir = occ_l ? Direction::Right : Direction::Left;
      const Site from = occ_l ? e : e + 1;
      auto mv = lat.attempt(from, dir);
      tr.events.push_back({time, *mv});
      touched_edge = e <= lo + kMargin || e + 1 >= hi - 1 - kMargin;
    }
    auto& la = label[static_cast<std::size_t>(e - lo)];
    auto& lb = label[static_cast<std::size_t>(e + 1 - lo)];
    std::swap(la, lb);
    if (la >= 0) {
      pos_of[static_cast<std::size_t>(la)] = e;
      touched_edge |= e <= lo + kMargin;
    }
    if (lb >= 0) {
      pos_of[static_cast<std::size_t>(lb)] = e + 1;
      touched_edge |= e + 1 >= hi - 1 - kMargin;
    }
    if (touched_edge) grow(e - lo < hi - 1 - e);
  }
  for (std::size_t i = 0; i < walks.size(); ++i) walks[i].end = pos_of[i];
  return {std::move(tr), std::move(walks)};
}

/// Independent rate-1/2 + 1/2 symmetric walks; returns final positions.
inline std::vector<Site> independent_walks(const std::vector<Site>& starts, double t_end,
                                           RngStream stream) {
  RngEngine eng(stream);
  std::vector<Site> out;
  out.reserve(starts.size());
  for (Site s : starts) {
    Site pos = s;
    double time = 0.0;
    for (;;) {
      time += eng.exponential(1.0);
      if (time >= t_end) break;
      pos += eng.bernoulli(0.5) ? 1 : -1;
    }
    out.push_back(pos);
  }
  return out;
}

}  // namespace tube
