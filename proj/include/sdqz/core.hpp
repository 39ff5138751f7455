#pragma once

// Field description, error-bound resolution and block partitioning shared by
// the quantization, entropy and container layers.
//
// Dimensions are listed slowest axis first and data is stored row-major
// (last axis fastest). A 2D field with dims {A, B} stores point (a, b) at
// flat index a * B + b.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "sdqz/error.hpp"

namespace sdqz {

using Dims = std::vector<std::size_t>;

inline constexpr std::uint32_t kDefaultCap = 1024;
inline constexpr std::uint32_t kMinCap = 4;
inline constexpr std::uint32_t kMaxCap = 65536;
inline constexpr std::size_t kMaxRank = 3;

inline std::string dims_to_string(const Dims& dims) {
  std::ostringstream os;
  for (std::size_t i = 0; i < dims.size(); ++i) os << (i ? "x" : "") << dims[i];
  return os.str();
}

inline std::size_t checked_volume(const Dims& dims) {
  if (dims.empty() || dims.size() > kMaxRank)
    throw Error(Errc::invalid_argument,
                "field must have 1 to 3 dimensions, got " + std::to_string(dims.size()));
  std::size_t n = 1;
  for (std::size_t d : dims) {
    if (d == 0) throw Error(Errc::invalid_argument, "dimension extents must be positive");
    if (n > std::numeric_limits<std::size_t>::max() / d)
      throw Error(Errc::invalid_argument, "dimension product overflows");
    n *= d;
  }
  return n;
}

// dims padded with leading 1s to three axes: {z, y, x}.
inline std::array<std::size_t, 3> to_shape3(const Dims& dims) {
  std::array<std::size_t, 3> s{1, 1, 1};
  std::size_t off = 3 - dims.size();
  for (std::size_t i = 0; i < dims.size(); ++i) s[off + i] = dims[i];
  return s;
}

/// Parses "AxBxC" (slowest axis first). Up to four extents are accepted;
/// see fold_to_3d for the four-axis case.
inline Dims parse_dims(const std::string& text) {
  Dims dims;
  std::size_t pos = 0;
  while (true) {
    std::size_t next = text.find('x', pos);
    std::string part = text.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
    if (part.empty() || part.find_first_not_of("0123456789") != std::string::npos)
      throw Error(Errc::invalid_argument, "malformed dims '" + text + "'; expected e.g. 100x500x500");
    std::size_t v = 0;
    try {
      v = std::stoull(part);
    } catch (const std::exception&) {
      throw Error(Errc::invalid_argument, "dimension extent out of range in '" + text + "'");
    }
    if (v == 0) throw Error(Errc::invalid_argument, "dimension extents must be positive");
    dims.push_back(v);
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  if (dims.size() > 4)
    throw Error(Errc::invalid_argument, "at most 4 dimensions are supported, got " + std::to_string(dims.size()));
  return dims;
}

/// Four-axis inputs are treated as a stack of 3D fields: the two slowest
/// axes are merged. Storage order is unchanged.
inline Dims fold_to_3d(const Dims& dims) {
  if (dims.size() <= 3) return dims;
  return {dims[0] * dims[1], dims[2], dims[3]};
}

struct FieldDescriptor {
  Dims dims;
  std::size_t n_points = 0;
  double value_min = 0.0;
  double value_max = 0.0;
  bool contains_nonfinite = false;

  std::size_t rank() const { return dims.size(); }
  double range() const { return value_max - value_min; }
};

// Min/max are taken over finite values only; if any NaN/Inf is present the
// descriptor is flagged and downstream stages refuse it.
template <std::floating_point T>
FieldDescriptor describe_field(std::span<const T> data, const Dims& dims) {
  FieldDescriptor fd;
  fd.dims = dims;
  fd.n_points = checked_volume(dims);
  if (data.size() != fd.n_points) {
    throw Error(Errc::length_mismatch, "data has " + std::to_string(data.size()) +
                                           " values but dims " + dims_to_string(dims) +
                                           " imply " + std::to_string(fd.n_points));
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (T v : data) {
    if (!std::isfinite(v)) {
      fd.contains_nonfinite = true;
      continue;
    }
    lo = std::min(lo, static_cast<double>(v));
    hi = std::max(hi, static_cast<double>(v));
  }
  if (lo > hi) lo = hi = 0.0;  // every value nonfinite
  fd.value_min = lo;
  fd.value_max = hi;
  return fd;
}

enum class ErrorBoundMode : std::uint8_t { absolute = 0, value_range_relative = 1 };

struct ErrorBoundSpec {
  ErrorBoundMode mode = ErrorBoundMode::absolute;
  double magnitude = 0.0;

  static ErrorBoundSpec absolute(double m) { return {ErrorBoundMode::absolute, m}; }
  static ErrorBoundSpec valrel(double m) { return {ErrorBoundMode::value_range_relative, m}; }
};

/// Turns a user-facing bound into an absolute one in data units.
/// Always returns a finite eb > 0 or throws.
inline double resolve_error_bound(const ErrorBoundSpec& spec, const FieldDescriptor& fd) {
  if (fd.contains_nonfinite)
    throw Error(Errc::nonfinite_input, "field contains NaN or Inf values");
  if (!(spec.magnitude > 0.0) || !std::isfinite(spec.magnitude))
    throw Error(Errc::invalid_argument, "error bound must be positive");
  if (spec.mode == ErrorBoundMode::absolute) return spec.magnitude;

  double range = fd.range();
  if (!(range > 0.0)) {
    throw Error(Errc::invalid_argument,
                "value-range-relative bound is undefined for a constant field "
                "(zero value range); use an absolute error bound instead");
  }
  double eb = spec.magnitude * range;
  if (!(eb > 0.0) || !std::isfinite(eb))
    throw Error(Errc::invalid_argument, "resolved error bound is not a positive finite number");
  return eb;
}

/// Quantization step bound for a field stored as T. Reconstruction happens in
/// double and is rounded to T on output, which may add half an ulp of T, so
/// the step is shaved by two ulps at the field's largest magnitude. The
/// rounded output then stays within `eb`. Bounds below four ulps are halved
/// instead; such a bound cannot be met exactly at that magnitude anyway.
template <std::floating_point T>
double quantization_bound(double eb, const FieldDescriptor& fd) {
  double top = std::max(std::fabs(fd.value_min), std::fabs(fd.value_max)) + eb;
  T t = static_cast<T>(top);
  double ulp = static_cast<double>(std::nextafter(t, std::numeric_limits<T>::infinity()) - t);
  if (!std::isfinite(ulp)) return eb;
  return std::max(eb - 2.0 * ulp, eb / 2.0);
}

inline std::vector<std::uint32_t> default_block_shape(std::size_t rank) {
  switch (rank) {
    case 1: return {32};
    case 2: return {16, 16};
    case 3: return {8, 8, 8};
    default:
      throw Error(Errc::invalid_argument, "no default block shape for rank " + std::to_string(rank));
  }
}

struct QuantConfig {
  double eb = 0.0;
  std::uint32_t cap = kDefaultCap;
  std::uint32_t radius = kDefaultCap / 2;
  std::vector<std::uint32_t> block_shape;

  static QuantConfig make(double eb, std::size_t rank, std::uint32_t cap = kDefaultCap) {
    QuantConfig cfg{eb, cap, cap / 2, default_block_shape(rank)};
    cfg.validate();
    return cfg;
  }

  void validate() const {
    if (!(eb > 0.0) || !std::isfinite(eb))
      throw Error(Errc::invalid_argument, "error bound must be positive");
    if (cap < kMinCap || cap > kMaxCap || !std::has_single_bit(cap))
      throw Error(Errc::invalid_argument,
                  "cap must be a power of two in [4, 65536], got " + std::to_string(cap));
    if (radius != cap / 2) throw Error(Errc::invalid_argument, "radius must equal cap / 2");
    if (block_shape.empty() || block_shape.size() > kMaxRank)
      throw Error(Errc::invalid_argument, "block shape must have 1 to 3 axes");
    for (auto b : block_shape)
      if (b == 0) throw Error(Errc::invalid_argument, "block extents must be positive");
  }
};

// One block in {z, y, x} coordinates, clipped to the field.
struct Block {
  std::array<std::size_t, 3> origin{};
  std::array<std::size_t, 3> extent{};

  std::size_t volume() const { return extent[0] * extent[1] * extent[2]; }
};

struct BlockGrid {
  Dims dims;
  std::vector<std::uint32_t> block_shape;
  std::vector<std::size_t> blocks_per_axis;
  std::size_t total_blocks = 0;

  // Blocks are numbered row-major over the grid.
  Block block(std::size_t index) const {
    auto shape = to_shape3(dims);
    std::array<std::size_t, 3> bshape{1, 1, 1}, grid{1, 1, 1};
    std::size_t off = 3 - dims.size();
    for (std::size_t i = 0; i < dims.size(); ++i) {
      bshape[off + i] = block_shape[i];
      grid[off + i] = blocks_per_axis[i];
    }
    std::array<std::size_t, 3> coord{index / (grid[1] * grid[2]), (index / grid[2]) % grid[1],
                                     index % grid[2]};
    Block b;
    for (int a = 0; a < 3; ++a) {
      b.origin[a] = coord[a] * bshape[a];
      b.extent[a] = std::min<std::size_t>(bshape[a], shape[a] - b.origin[a]);
    }
    return b;
  }
};

inline BlockGrid partition_blocks(const Dims& dims, const QuantConfig& cfg) {
  checked_volume(dims);
  if (dims.size() != cfg.block_shape.size())
    throw Error(Errc::invalid_argument, "block shape rank does not match field rank");
  BlockGrid g{dims, cfg.block_shape, {}, 1};
  for (std::size_t i = 0; i < dims.size(); ++i) {
    std::size_t n = (dims[i] + cfg.block_shape[i] - 1) / cfg.block_shape[i];
    g.blocks_per_axis.push_back(n);
    g.total_blocks *= n;
  }
  return g;
}

inline BlockGrid partition_blocks(const FieldDescriptor& fd, const QuantConfig& cfg) {
  return partition_blocks(fd.dims, cfg);
}

}  // namespace sdqz
