#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tube/config.hpp"
#include "tube/rng.hpp"

namespace tube {

struct Event {
  double time;
  Move move;
};

/// A realized path: initial configuration plus the time-ordered jumps on
/// [0, horizon]. Every path statistic and the path log-weight replay from
/// this record.
struct Trajectory {
  Configuration initial;
  std::vector<Event> events;
  double horizon = 0.0;

  Configuration final_state() const {
    std::vector<Part> parts = initial.parts();
    for (const Event& e : events) apply_move_unchecked(parts, e.move);
    return Configuration::unchecked(std::move(parts));
  }
};

struct TrajectoryStats {
  std::int64_t d_end = 0;
  std::int64_t max_d = 0;
  Site max_m = -1;
  std::uint64_t rights = 0;  // R
  std::uint64_t lefts = 0;   // L
  double int_j = 0.0;        // integral of J over [0, horizon]
  double int_j1 = 0.0;       // integral of J+1; always int_j + horizon
  std::vector<Site> particle_peak;  // max position of particle k, k = 1..size

  /// Max position ever reached by particle k; -k if it never moved.
  Site particle_max(std::int32_t k) const {
    if (k >= 1 && static_cast<std::size_t>(k) <= particle_peak.size()) {
      return particle_peak[static_cast<std::size_t>(k) - 1];
    }
    return -k;
  }
};

namespace detail {

inline std::int32_t count_runs(const std::vector<Part>& parts) {
  std::int32_t runs = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i + 1 == parts.size() || parts[i] > parts[i + 1]) ++runs;
  }
  return runs;
}

}  // namespace detail

/// Exact replay of a trajectory. Validates event ordering and move
/// legality while accumulating the path statistics; the J integral uses
/// compensated summation so path weights are reproducible to ~1e-12.
inline TrajectoryStats trajectory_stats(const Trajectory& tr) {
  TrajectoryStats s;
  std::vector<Part> parts = tr.initial.parts();
  std::int64_t d = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    d += parts[k];
    s.particle_peak.push_back(parts[k] - static_cast<Site>(k) - 1);
  }
  const std::int64_t d0 = d;
  s.max_d = d;
  s.max_m = parts.empty() ? -1 : parts[0] - 1;

  double int_j = 0.0, comp = 0.0;  // Kahan pair
  auto add_segment = [&](double dt, std::int32_t j) {
    const double y = dt * j - comp;
    const double t = int_j + y;
    comp = (t - int_j) - y;
    int_j = t;
  };
  auto right_legal = [&](std::int32_t k) {
    if (k < 1 || static_cast<std::size_t>(k) > parts.size() + 1) return false;
    if (static_cast<std::size_t>(k) == parts.size() + 1) return true;
    return k == 1 || parts[k - 1] < parts[k - 2];
  };
  auto left_legal = [&](std::int32_t k) {
    if (k < 1 || static_cast<std::size_t>(k) > parts.size()) return false;
    const Part below = static_cast<std::size_t>(k) < parts.size() ? parts[k] : 0;
    return parts[k - 1] > below;
  };

  double prev = 0.0;
  std::int32_t j = detail::count_runs(parts);
  for (const Event& e : tr.events) {
    if (!(e.time > prev) || e.time > tr.horizon) {
      throw std::invalid_argument(
          "trajectory events must be strictly increasing within [0, horizon]");
    }
    add_segment(e.time - prev, j);
    prev = e.time;
    const std::int32_t k = e.move.particle;
    if (e.move.direction == Direction::Right) {
      if (!right_legal(k)) throw std::invalid_argument("illegal right move in trajectory replay");
      apply_move_unchecked(parts, e.move);
      ++s.rights;
      ++d;
      const Site pos = parts[k - 1] - k;
      if (static_cast<std::size_t>(k) > s.particle_peak.size()) {
        s.particle_peak.push_back(pos);
      } else {
        s.particle_peak[k - 1] = std::max(s.particle_peak[k - 1], pos);
      }
    } else {
      if (!left_legal(k)) throw std::invalid_argument("illegal left move in trajectory replay");
      apply_move_unchecked(parts, e.move);
      ++s.lefts;
      --d;
    }
    s.max_d = std::max(s.max_d, d);
    s.max_m = std::max<Site>(s.max_m, parts.empty() ? -1 : parts[0] - 1);
    j = detail::count_runs(parts);
  }
  add_segment(tr.horizon - prev, j);

  s.d_end = d;
  s.int_j = int_j;
  s.int_j1 = int_j + tr.horizon;
  if (s.d_end - d0 != static_cast<std::int64_t>(s.rights) - static_cast<std::int64_t>(s.lefts)) {
    throw std::logic_error("trajectory replay broke the R - L = D identity");
  }
  return s;
}

/// Log-likelihood of the path under jump parameter p:
/// R log p + L log(1-p) - p t - int J ds.
inline double log_path_weight(const Trajectory& tr, double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("log_path_weight: p in (0,1)");
  const TrajectoryStats s = trajectory_stats(tr);
  return static_cast<double>(s.rights) * std::log(p) +
         static_cast<double>(s.lefts) * std::log1p(-p) - p * tr.horizon - s.int_j;
}

/// Line format: header comments, then one "time direction particle" row
/// per event. Numbers carry 17 significant digits so a round-trip is exact.
inline void write_trajectory(std::ostream& os, const Trajectory& tr, double p,
                             RngStream stream) {
  os << "# tube-trajectory v1\n";
  os << "# parts:";
  for (Part b : tr.initial.parts()) os << ' ' << b;
  os << '\n';
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", p);
  os << "# p: " << buf << '\n';
  std::snprintf(buf, sizeof(buf), "%.17g", tr.horizon);
  os << "# t_end: " << buf << '\n';
  os << "# seed: " << stream.seed << ' ' << stream.stream << '\n';
  for (const Event& e : tr.events) {
    std::snprintf(buf, sizeof(buf), "%.17g", e.time);
    os << buf << (e.move.direction == Direction::Right ? " R " : " L ") << e.move.particle
       << '\n';
  }
}

struct TrajectoryFile {
  Trajectory trajectory;
  double p = 0.5;
  RngStream stream;
};

inline TrajectoryFile read_trajectory(std::istream& is) {
  TrajectoryFile out;
  std::string line;
  bool have_horizon = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::istringstream ls(line.substr(1));
      std::string key;
      ls >> key;
      if (key == "parts:") {
        std::vector<Part> parts;
        Part b;
        while (ls >> b) parts.push_back(b);
        out.trajectory.initial = Configuration(std::move(parts));
      } else if (key == "p:") {
        ls >> out.p;
      } else if (key == "t_end:") {
        ls >> out.trajectory.horizon;
        have_horizon = true;
      } else if (key == "seed:") {
        ls >> out.stream.seed >> out.stream.stream;
      }
      continue;
    }
    std::istringstream ls(line);
    double t;
    std::string dir;
    std::int32_t k;
    if (!(ls >> t >> dir >> k) || (dir != "R" && dir != "L")) {
      throw std::invalid_argument("malformed trajectory event line: " + line);
    }
    out.trajectory.events.push_back(
        {t, {dir == "R" ? Direction::Right : Direction::Left, k}});
  }
  if (!have_horizon) throw std::invalid_argument("trajectory file missing t_end header");
  return out;
}

}  // namespace tube
