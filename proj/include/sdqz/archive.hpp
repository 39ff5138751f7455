#pragma once

// The .sdqz container. All integers and floats are little-endian, sections
// follow each other with no padding:
//
//   offset  size  field
//        0     4  magic "SDQZ"
//        4     1  version (1)
//        5     1  dtype (0 = f32, 1 = f64)
//        6     1  ndims (1..3)
//        7     1  eb_mode (0 = absolute, 1 = value-range-relative)
//        8    24  dims[3] u64, slowest axis first, unused trailing entries = 1
//       32     8  eb_resolved f64 (quantization bound, data units; at most the requested bound)
//       40     8  eb_specified f64 (as given by the user)
//       48     4  cap u32
//       52    12  block_shape[3] u32, unused trailing entries = 1
//       64     4  deflate_chunk_size u32
//       68     1  unit_width u8 (32 | 64)
//       69     8  n_outliers u64
//       77     8  n_chunks u64
//       85     8  payload_bytes u64
//       93        bitwidth table (cap x u8)
//                 outliers (n_outliers x {u64 index, f64 prequantized value})
//                 chunk bit lengths (n_chunks x u32)
//                 payload (payload_bytes)

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "sdqz/core.hpp"
#include "sdqz/dualquant.hpp"
#include "sdqz/error.hpp"
#include "sdqz/huffman.hpp"

namespace sdqz {

inline constexpr std::array<char, 4> kArchiveMagic{'S', 'D', 'Q', 'Z'};
inline constexpr std::uint8_t kArchiveVersion = 1;
inline constexpr std::size_t kArchiveHeaderSize = 93;

enum class DType : std::uint8_t { f32 = 0, f64 = 1 };

template <class T>
constexpr DType dtype_of() {
  if constexpr (std::is_same_v<T, float>)
    return DType::f32;
  else
    return DType::f64;
}

inline std::size_t dtype_size(DType t) { return t == DType::f32 ? 4 : 8; }

struct ArchiveHeader {
  DType dtype = DType::f32;
  ErrorBoundMode eb_mode = ErrorBoundMode::absolute;
  Dims dims;
  double eb_resolved = 0.0;
  double eb_specified = 0.0;
  std::uint32_t cap = kDefaultCap;
  std::vector<std::uint32_t> block_shape;
  std::uint32_t chunk_size = 0;
  std::uint8_t unit_width = 32;
  // n_outliers, n_chunks and payload_bytes are derived from the sections.

  friend bool operator==(const ArchiveHeader&, const ArchiveHeader&) = default;
};

struct Archive {
  ArchiveHeader header;
  std::vector<std::uint8_t> bitwidths;
  std::vector<Outlier> outliers;
  std::vector<std::uint32_t> chunk_bit_lengths;
  std::vector<std::uint8_t> payload;

  std::size_t n_points() const { return checked_volume(header.dims); }

  QuantConfig quant_config() const {
    return QuantConfig{header.eb_resolved, header.cap, header.cap / 2, header.block_shape};
  }

  DeflatedStream stream() const { return {header.chunk_size, chunk_bit_lengths, payload}; }

  std::size_t serialized_size() const {
    return kArchiveHeaderSize + bitwidths.size() + 16 * outliers.size() +
           4 * chunk_bit_lengths.size() + payload.size();
  }

  friend bool operator==(const Archive&, const Archive&) = default;
};

namespace detail {

class ByteWriter {
 public:
  explicit ByteWriter(std::size_t reserve) { out_.reserve(reserve); }

  template <class U>
  void put(U v) {
    static_assert(std::is_unsigned_v<U>);
    for (std::size_t i = 0; i < sizeof(U); ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void put_f64(double v) { put(std::bit_cast<std::uint64_t>(v)); }
  void put_bytes(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }

  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> in) : in_(in) {}

  void need(std::size_t n, const char* what) const {
    if (in_.size() - pos_ < n)
      throw Error(Errc::short_read, std::string("archive truncated while reading ") + what);
  }

  template <class U>
  U get(const char* what) {
    need(sizeof(U), what);
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(U{in_[pos_ + i]} << (8 * i));
    pos_ += sizeof(U);
    return v;
  }
  double get_f64(const char* what) { return std::bit_cast<double>(get<std::uint64_t>(what)); }

  std::span<const std::uint8_t> get_bytes(std::size_t n, const char* what) {
    need(n, what);
    auto s = in_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Checks every cross-section invariant. Used on both sides of the codec.
inline void validate_archive(const Archive& a) {
  const auto& h = a.header;
  if (h.dtype != DType::f32 && h.dtype != DType::f64)
    throw Error(Errc::unsupported_dtype, "unsupported dtype " + std::to_string(static_cast<int>(h.dtype)));
  if (h.dims.empty() || h.dims.size() > kMaxRank)
    throw Error(Errc::integrity, "ndims must be 1, 2 or 3");
  for (auto d : h.dims)
    if (d == 0) throw Error(Errc::integrity, "dimension extent is zero");
  std::size_t n = checked_volume(h.dims);
  if (h.eb_mode != ErrorBoundMode::absolute && h.eb_mode != ErrorBoundMode::value_range_relative)
    throw Error(Errc::integrity, "unknown error-bound mode");
  if (!(h.eb_resolved > 0.0) || !std::isfinite(h.eb_resolved))
    throw Error(Errc::integrity, "resolved error bound must be positive and finite");
  if (!std::isfinite(h.eb_specified)) throw Error(Errc::integrity, "specified error bound is not finite");
  if (h.cap < kMinCap || h.cap > kMaxCap || !std::has_single_bit(h.cap))
    throw Error(Errc::integrity, "cap must be a power of two in [4, 65536]");
  if (h.block_shape.size() != h.dims.size())
    throw Error(Errc::integrity, "block shape rank does not match ndims");
  for (auto b : h.block_shape)
    if (b == 0) throw Error(Errc::integrity, "block extent is zero");
  if (h.chunk_size == 0) throw Error(Errc::integrity, "deflate chunk size is zero");
  if (h.unit_width != 32 && h.unit_width != 64) throw Error(Errc::integrity, "unit width must be 32 or 64");

  if (a.bitwidths.size() != h.cap)
    throw Error(Errc::length_mismatch, "bitwidth table has " + std::to_string(a.bitwidths.size()) +
                                           " entries, expected cap = " + std::to_string(h.cap));
  check_kraft(a.bitwidths);
  unsigned max_w = 0;
  for (auto w : a.bitwidths) max_w = std::max<unsigned>(max_w, w);
  if (select_unit_width(max_w) != h.unit_width)
    throw Error(Errc::integrity, "unit width does not match the codebook's maximum bitwidth");

  if (a.outliers.size() > n) throw Error(Errc::length_mismatch, "more outliers than points");
  for (std::size_t i = 0; i < a.outliers.size(); ++i) {
    if (a.outliers[i].index >= n) throw Error(Errc::integrity, "outlier index out of range");
    if (i > 0 && a.outliers[i].index <= a.outliers[i - 1].index)
      throw Error(Errc::integrity, "outlier indices are not strictly increasing");
    if (!std::isfinite(a.outliers[i].value)) throw Error(Errc::integrity, "outlier value is not finite");
  }

  if (a.chunk_bit_lengths.size() != chunk_count(n, h.chunk_size))
    throw Error(Errc::length_mismatch,
                "archive has " + std::to_string(a.chunk_bit_lengths.size()) + " chunks, expected " +
                    std::to_string(chunk_count(n, h.chunk_size)));
  std::size_t payload_bytes = 0;
  for (auto bits : a.chunk_bit_lengths) payload_bytes += (std::size_t{bits} + 7) / 8;
  if (payload_bytes != a.payload.size())
    throw Error(Errc::length_mismatch, "payload is " + std::to_string(a.payload.size()) +
                                           " bytes but chunk bit lengths imply " +
                                           std::to_string(payload_bytes));
}

/// Builds an archive from the pipeline stages, checking they agree.
inline Archive assemble_archive(const QuantOutput& q, const DeflatedStream& ds,
                                std::span<const std::uint8_t> bitwidths, unsigned unit_width,
                                const ErrorBoundSpec& spec, DType dtype) {
  if (ds.chunk_bit_lengths.size() != chunk_count(q.codes.size(), ds.chunk_size))
    throw Error(Errc::length_mismatch, "deflated stream chunk count does not match the code count");
  Archive a;
  a.header.dtype = dtype;
  a.header.eb_mode = spec.mode;
  a.header.dims = q.dims;
  a.header.eb_resolved = q.cfg.eb;
  a.header.eb_specified = spec.magnitude;
  a.header.cap = q.cfg.cap;
  a.header.block_shape = q.cfg.block_shape;
  a.header.chunk_size = ds.chunk_size;
  a.header.unit_width = static_cast<std::uint8_t>(unit_width);
  a.bitwidths.assign(bitwidths.begin(), bitwidths.end());
  a.outliers = q.outliers;
  a.chunk_bit_lengths = ds.chunk_bit_lengths;
  a.payload = ds.payload;
  validate_archive(a);
  return a;
}

inline std::vector<std::uint8_t> serialize(const Archive& a) {
  validate_archive(a);
  const auto& h = a.header;
  detail::ByteWriter w(a.serialized_size());
  for (char c : kArchiveMagic) w.put(static_cast<std::uint8_t>(c));
  w.put(kArchiveVersion);
  w.put(static_cast<std::uint8_t>(h.dtype));
  w.put(static_cast<std::uint8_t>(h.dims.size()));
  w.put(static_cast<std::uint8_t>(h.eb_mode));
  for (std::size_t i = 0; i < 3; ++i) w.put(std::uint64_t{i < h.dims.size() ? h.dims[i] : 1});
  w.put_f64(h.eb_resolved);
  w.put_f64(h.eb_specified);
  w.put(h.cap);
  for (std::size_t i = 0; i < 3; ++i) w.put(i < h.block_shape.size() ? h.block_shape[i] : std::uint32_t{1});
  w.put(h.chunk_size);
  w.put(h.unit_width);
  w.put(std::uint64_t{a.outliers.size()});
  w.put(std::uint64_t{a.chunk_bit_lengths.size()});
  w.put(std::uint64_t{a.payload.size()});
  w.put_bytes(a.bitwidths);
  for (const auto& o : a.outliers) {
    w.put(o.index);
    w.put_f64(o.value);
  }
  for (auto bits : a.chunk_bit_lengths) w.put(bits);
  w.put_bytes(a.payload);
  return w.take();
}

inline Archive deserialize(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  auto magic = r.get_bytes(4, "magic");
  if (!std::equal(magic.begin(), magic.end(), kArchiveMagic.begin()))
    throw Error(Errc::bad_magic, "bad magic: not an SDQZ archive");
  auto version = r.get<std::uint8_t>("version");
  if (version != kArchiveVersion)
    throw Error(Errc::unsupported_version, "unsupported archive version " + std::to_string(version));
  auto dtype = r.get<std::uint8_t>("dtype");
  if (dtype > 1) throw Error(Errc::unsupported_dtype, "unsupported dtype " + std::to_string(dtype));
  auto ndims = r.get<std::uint8_t>("ndims");
  if (ndims < 1 || ndims > 3) throw Error(Errc::integrity, "ndims must be 1, 2 or 3");
  auto eb_mode = r.get<std::uint8_t>("eb_mode");
  if (eb_mode > 1) throw Error(Errc::integrity, "unknown error-bound mode " + std::to_string(eb_mode));

  Archive a;
  auto& h = a.header;
  h.dtype = static_cast<DType>(dtype);
  h.eb_mode = static_cast<ErrorBoundMode>(eb_mode);
  for (std::size_t i = 0; i < 3; ++i) {
    auto d = r.get<std::uint64_t>("dims");
    if (i < ndims)
      h.dims.push_back(static_cast<std::size_t>(d));
    else if (d != 1)
      throw Error(Errc::integrity, "unused dimension entries must be 1");
  }
  h.eb_resolved = r.get_f64("eb_resolved");
  h.eb_specified = r.get_f64("eb_specified");
  h.cap = r.get<std::uint32_t>("cap");
  for (std::size_t i = 0; i < 3; ++i) {
    auto b = r.get<std::uint32_t>("block_shape");
    if (i < ndims)
      h.block_shape.push_back(b);
    else if (b != 1)
      throw Error(Errc::integrity, "unused block shape entries must be 1");
  }
  h.chunk_size = r.get<std::uint32_t>("deflate_chunk_size");
  h.unit_width = r.get<std::uint8_t>("unit_width");
  auto n_outliers = r.get<std::uint64_t>("n_outliers");
  auto n_chunks = r.get<std::uint64_t>("n_chunks");
  auto payload_bytes = r.get<std::uint64_t>("payload_bytes");

  if (h.cap < kMinCap || h.cap > kMaxCap || !std::has_single_bit(h.cap))
    throw Error(Errc::integrity, "cap must be a power of two in [4, 65536]");
  // Size checks before allocating anything driven by header counts.
  if (n_outliers > r.remaining() / 16) throw Error(Errc::short_read, "archive truncated in outlier section");
  if (n_chunks > r.remaining() / 4) throw Error(Errc::short_read, "archive truncated in chunk length section");
  std::uint64_t body = std::uint64_t{h.cap} + 16 * n_outliers + 4 * n_chunks + payload_bytes;
  if (payload_bytes > r.remaining() || body > r.remaining())
    throw Error(Errc::short_read, "archive truncated: sections need " + std::to_string(body) +
                                      " bytes, " + std::to_string(r.remaining()) + " present");
  if (body < r.remaining())
    throw Error(Errc::length_mismatch, std::to_string(r.remaining() - body) + " trailing bytes after archive");

  auto bw = r.get_bytes(h.cap, "bitwidth table");
  a.bitwidths.assign(bw.begin(), bw.end());
  a.outliers.resize(n_outliers);
  for (auto& o : a.outliers) {
    o.index = r.get<std::uint64_t>("outlier index");
    o.value = r.get_f64("outlier value");
  }
  a.chunk_bit_lengths.resize(n_chunks);
  for (auto& c : a.chunk_bit_lengths) c = r.get<std::uint32_t>("chunk bit lengths");
  auto payload = r.get_bytes(payload_bytes, "payload");
  a.payload.assign(payload.begin(), payload.end());

  validate_archive(a);
  return a;
}

}  // namespace sdqz
