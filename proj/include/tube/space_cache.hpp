#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tube/generator.hpp"
#include "tube/state_space.hpp"

namespace tube {

struct CacheError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Enumerated space plus its generator, as stored on disk.
struct CachedSpace {
  StateSpace space;
  RateMatrix generator;
};

namespace detail {

constexpr std::uint64_t kCacheMagic = 0x454341435F454255ULL;  // "UBE_CACE"
constexpr std::uint32_t kCacheVersion = 1;

inline std::uint64_t fnv1a(const void* data, std::size_t bytes, std::uint64_t h) {
  const auto* b = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= b[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t state_list_checksum(const StateSpace& space) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  h = fnv1a(space.arena().data(), space.arena().size() * sizeof(Part), h);
  h = fnv1a(space.offsets().data(), space.offsets().size() * sizeof(std::uint64_t), h);
  return h;
}

template <typename T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void write_vec(std::ostream& os, const std::vector<T>& v) {
  write_pod<std::uint64_t>(os, v.size());
  os.write(reinterpret_cast<const char*>(v.data()),
           static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <typename T>
T read_pod(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw CacheError("cache file truncated");
  return v;
}

template <typename T>
std::vector<T> read_vec(std::istream& is) {
  const auto n = read_pod<std::uint64_t>(is);
  std::vector<T> v(n);
  is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(T)));
  if (!is) throw CacheError("cache file truncated");
  return v;
}

}  // namespace detail

/// Writes space + generator in the versioned binary cache format. Header:
/// magic, format version, N, p, state count, then the checksummed canonical
/// state list and the sparse generator.
inline void save_space_cache(const std::string& path, const StateSpace& space,
                             const RateMatrix& q) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw CacheError("cannot open cache file for writing: " + path);
  detail::write_pod(os, detail::kCacheMagic);
  detail::write_pod(os, detail::kCacheVersion);
  detail::write_pod<std::int32_t>(os, space.truncation());
  detail::write_pod<double>(os, q.p);
  detail::write_pod<std::uint64_t>(os, space.size());
  detail::write_pod<std::uint64_t>(os, detail::state_list_checksum(space));
  detail::write_vec(os, space.arena());
  detail::write_vec(os, space.offsets());
  detail::write_pod<std::uint8_t>(os, static_cast<std::uint8_t>(q.boundary));
  detail::write_pod<double>(os, q.lambda);
  detail::write_vec(os, q.row_ptr);
  detail::write_vec(os, q.col);
  detail::write_vec(os, q.rate);
  detail::write_vec(os, q.outflow);
  if (!os) throw CacheError("write failure on cache file: " + path);
}

inline CachedSpace load_space_cache(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CacheError("cannot open cache file: " + path);
  if (detail::read_pod<std::uint64_t>(is) != detail::kCacheMagic) {
    throw CacheError("not a tube cache file: " + path);
  }
  const auto version = detail::read_pod<std::uint32_t>(is);
  if (version != detail::kCacheVersion) {
    throw CacheError("unsupported cache format version " + std::to_string(version));
  }
  const auto n = detail::read_pod<std::int32_t>(is);
  const auto p = detail::read_pod<double>(is);
  const auto count = detail::read_pod<std::uint64_t>(is);
  const auto checksum = detail::read_pod<std::uint64_t>(is);
  auto arena = detail::read_vec<Part>(is);
  auto offsets = detail::read_vec<std::uint64_t>(is);

  StateSpace space = StateSpace::from_raw(n, std::move(arena), std::move(offsets));
  if (space.size() != count) {
    throw CacheError("cache state count mismatch: header says " + std::to_string(count) +
                     ", payload has " + std::to_string(space.size()));
  }
  if (detail::state_list_checksum(space) != checksum) {
    throw CacheError("cache checksum mismatch: state list is corrupt");
  }

  RateMatrix q;
  q.p = p;
  q.boundary = static_cast<Boundary>(detail::read_pod<std::uint8_t>(is));
  q.lambda = detail::read_pod<double>(is);
  q.row_ptr = detail::read_vec<std::uint64_t>(is);
  q.col = detail::read_vec<std::uint32_t>(is);
  q.rate = detail::read_vec<double>(is);
  q.outflow = detail::read_vec<double>(is);
  if (q.row_ptr.size() != space.size() + 1 || q.outflow.size() != space.size()) {
    throw CacheError("cache generator dimensions inconsistent with state list");
  }
  return {std::move(space), std::move(q)};
}

}  // namespace tube
