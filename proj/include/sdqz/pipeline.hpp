#pragma once

// End-to-end codec: float array <-> .sdqz bytes.

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "sdqz/archive.hpp"
#include "sdqz/core.hpp"
#include "sdqz/dualquant.hpp"
#include "sdqz/huffman.hpp"

namespace sdqz {

struct CompressOptions {
  std::uint32_t cap = kDefaultCap;
  std::uint32_t chunk_size = 0;  // 0 selects default_chunk_size()
  unsigned threads = 1;
};

struct Compressed {
  std::vector<std::uint8_t> bytes;
  FieldDescriptor field;
  double eb = 0.0;
  std::size_t n_outliers = 0;
  unsigned unit_width = 0;
};

namespace detail {

template <PackedUnit Unit>
DeflatedStream encode_and_deflate(std::span<const std::uint16_t> codes, const Codebook& cb,
                                  std::uint32_t chunk_size, unsigned threads) {
  auto packed = encode<Unit>(codes, cb, threads);
  return deflate<Unit>(packed, chunk_size, threads);
}

}  // namespace detail

inline Archive encode_quant_output(const QuantOutput& q, const ErrorBoundSpec& spec, DType dtype,
                                   std::uint32_t chunk_size, unsigned threads) {
  auto freq = histogram(q.codes, q.cfg.cap, threads);
  auto widths = build_tree(freq);
  auto [cb, rb] = canonize(widths);
  if (chunk_size == 0) chunk_size = default_chunk_size(q.codes.size());
  DeflatedStream ds = cb.unit_width == 32
                          ? detail::encode_and_deflate<std::uint32_t>(q.codes, cb, chunk_size, threads)
                          : detail::encode_and_deflate<std::uint64_t>(q.codes, cb, chunk_size, threads);
  return assemble_archive(q, ds, widths, cb.unit_width, spec, dtype);
}

template <std::floating_point T>
Compressed compress(std::span<const T> data, const Dims& dims, const ErrorBoundSpec& spec,
                    const CompressOptions& opt = {}) {
  Compressed out;
  out.field = describe_field(data, dims);
  out.eb = resolve_error_bound(spec, out.field);
  QuantConfig cfg = QuantConfig::make(quantization_bound<T>(out.eb, out.field), dims.size(), opt.cap);
  QuantOutput q = compress_field(data, dims, cfg, opt.threads);
  Archive a = encode_quant_output(q, spec, dtype_of<T>(), opt.chunk_size, opt.threads);
  out.n_outliers = a.outliers.size();
  out.unit_width = a.header.unit_width;
  out.bytes = serialize(a);
  return out;
}

/// Recovers the lossy-stage output (codes + outliers) from an archive.
inline QuantOutput decode_quant_output(const Archive& a, unsigned threads = 1) {
  ReverseCodebook rb = make_reverse_codebook(a.bitwidths);
  QuantOutput q;
  q.dims = a.header.dims;
  q.cfg = a.quant_config();
  q.codes = inflate(a.stream(), rb, a.n_points(), threads);
  q.outliers = a.outliers;
  return q;
}

struct DecodedField {
  DType dtype = DType::f32;
  Dims dims;
  std::variant<std::vector<float>, std::vector<double>> values;
};

inline DecodedField decompress(std::span<const std::uint8_t> bytes, unsigned threads = 1) {
  Archive a = deserialize(bytes);
  QuantOutput q = decode_quant_output(a, threads);
  DecodedField f{a.header.dtype, a.header.dims, {}};
  if (a.header.dtype == DType::f32)
    f.values = reconstruct_field<float>(q, threads);
  else
    f.values = reconstruct_field<double>(q, threads);
  return f;
}

template <std::floating_point T>
std::vector<T> decompress_as(std::span<const std::uint8_t> bytes, unsigned threads = 1) {
  DecodedField f = decompress(bytes, threads);
  if (f.dtype != dtype_of<T>())
    throw Error(Errc::unsupported_dtype, "archive element type does not match the requested type");
  return std::get<std::vector<T>>(std::move(f.values));
}

}  // namespace sdqz
