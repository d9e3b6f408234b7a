#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tube/config.hpp"
#include "tube/partitions.hpp"

namespace tube {

/// All configurations with D <= N in canonical order: distance ascending,
/// then lexicographic on the displacement sequence. Index 0 is the origin.
///
/// States live in one flat arena with an open-addressed index on top, so a
/// space of a few hundred thousand states stays cheap to build and query.
class StateSpace {
 public:
  static constexpr std::uint64_t kDefaultBudget = 5'000'000;

  explicit StateSpace(std::int32_t n, std::uint64_t max_states = kDefaultBudget) : n_(n) {
    if (n < 0) throw std::invalid_argument("StateSpace: truncation radius must be >= 0");
    const BigInt count = states_within(n);
    if (count > max_states) {
      throw std::length_error("StateSpace: N=" + std::to_string(n) + " needs " +
                              count.str() + " states, over the budget of " +
                              std::to_string(max_states) +
                              " (raise max_states to override)");
    }
    const auto total = static_cast<std::uint64_t>(count);
    offsets_.reserve(total + 1);
    offsets_.push_back(0);
    distance_.reserve(total);
    std::vector<Part> buf;
    for (std::int32_t d = 0; d <= n_; ++d) emit_partitions(d, d, buf);
    build_index();
  }

  std::int32_t truncation() const { return n_; }
  std::size_t size() const { return offsets_.size() - 1; }

  std::span<const Part> parts_of(std::uint32_t idx) const {
    return {arena_.data() + offsets_[idx], arena_.data() + offsets_[idx + 1]};
  }

  std::int32_t distance_of(std::uint32_t idx) const { return distance_[idx]; }

  Configuration configuration(std::uint32_t idx) const {
    auto s = parts_of(idx);
    return Configuration::unchecked({s.begin(), s.end()});
  }

  std::optional<std::uint32_t> find(std::span<const Part> parts) const {
    std::uint64_t h = hash_parts(parts);
    for (std::uint64_t slot = h & mask_;; slot = (slot + 1) & mask_) {
      const std::uint32_t entry = table_[slot];
      if (entry == kEmpty) return std::nullopt;
      if (equal_at(entry - 1, parts)) return entry - 1;
    }
  }

  std::uint32_t index_of(const Configuration& x) const {
    if (auto idx = find(x.span())) return *idx;
    throw std::out_of_range("configuration at distance " + std::to_string(x.distance()) +
                            " is outside the truncated space (N=" + std::to_string(n_) + ")");
  }

  /// Rebuilds a space from raw canonical storage (cache loading).
  static StateSpace from_raw(std::int32_t n, std::vector<Part> arena,
                             std::vector<std::uint64_t> offsets) {
    StateSpace s(PrivateTag{}, n, std::move(arena), std::move(offsets));
    return s;
  }

  const std::vector<Part>& arena() const { return arena_; }
  const std::vector<std::uint64_t>& offsets() const { return offsets_; }

 private:
  struct PrivateTag {};

  StateSpace(PrivateTag, std::int32_t n, std::vector<Part> arena,
             std::vector<std::uint64_t> offsets)
      : n_(n), arena_(std::move(arena)), offsets_(std::move(offsets)) {
    if (offsets_.empty() || offsets_.front() != 0 || offsets_.back() != arena_.size()) {
      throw std::invalid_argument("StateSpace::from_raw: inconsistent offsets");
    }
    distance_.reserve(size());
    for (std::uint32_t i = 0; i < size(); ++i) {
      std::int64_t d = 0;
      for (Part p : parts_of(i)) d += p;
      distance_.push_back(static_cast<std::int32_t>(d));
    }
    build_index();
  }

  // Partitions of `remaining` with parts <= `max_part`, emitted in
  // lexicographic order (leading part ascending, recursively). The buffer
  // is nonincreasing by construction.
  void emit_partitions(std::int32_t remaining, std::int32_t max_part, std::vector<Part>& buf) {
    if (remaining == 0) {
      arena_.insert(arena_.end(), buf.begin(), buf.end());
      offsets_.push_back(arena_.size());
      std::int32_t d = 0;
      for (Part p : buf) d += p;
      distance_.push_back(d);
      return;
    }
    for (std::int32_t a = 1; a <= std::min(remaining, max_part); ++a) {
      buf.push_back(a);
      emit_partitions(remaining - a, a, buf);
      buf.pop_back();
    }
  }

  void build_index() {
    const std::uint64_t want = std::max<std::uint64_t>(16, size() * 2);
    mask_ = std::bit_ceil(want) - 1;
    table_.assign(mask_ + 1, kEmpty);
    for (std::uint32_t i = 0; i < size(); ++i) {
      std::uint64_t h = hash_parts(parts_of(i));
      std::uint64_t slot = h & mask_;
      while (table_[slot] != kEmpty) slot = (slot + 1) & mask_;
      table_[slot] = i + 1;
    }
  }

  bool equal_at(std::uint32_t idx, std::span<const Part> parts) const {
    auto stored = parts_of(idx);
    return stored.size() == parts.size() &&
           std::equal(stored.begin(), stored.end(), parts.begin());
  }

  static std::uint64_t hash_parts(std::span<const Part> parts) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over part values
    for (Part p : parts) {
      h ^= static_cast<std::uint32_t>(p);
      h *= 0x100000001b3ULL;
    }
    return h;
  }

  static constexpr std::uint32_t kEmpty = 0;

  std::int32_t n_ = 0;
  std::vector<Part> arena_;
  std::vector<std::uint64_t> offsets_;
  std::vector<std::int32_t> distance_;
  std::vector<std::uint32_t> table_;
  std::uint64_t mask_ = 0;
};

}  // namespace tube
