#pragma once

// Entropy stage for quantization codes: histogram, Huffman code lengths,
// canonical codebook, fixed-width packed encoding and chunked deflate/inflate.
//
// A packed unit is a 32- or 64-bit word whose top 8 bits hold the codeword
// bitwidth and whose low bits hold the codeword, right-aligned. Deflate
// concatenates the codewords of each chunk MSB-first into a dense bit run;
// every chunk starts on a byte boundary so chunks decode independently.

#include <algorithm>
#include <bit>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sdqz/bitstream.hpp"
#include "sdqz/error.hpp"
#include "sdqz/parallel.hpp"

namespace sdqz {

using Histogram = std::vector<std::uint64_t>;

inline constexpr unsigned kMaxBitwidth = 56;  // 64-bit unit minus the 8-bit width field

/// Frequency of each code in [0, cap). Counted in per-worker private
/// histograms and merged, so the result is independent of `threads`.
inline Histogram histogram(std::span<const std::uint16_t> codes, std::uint32_t cap,
                           unsigned threads = 1) {
  std::vector<Histogram> partial(worker_count(codes.size(), threads), Histogram(cap, 0));
  parallel_for_workers(codes.size(), threads,
                       [&](std::size_t w, std::size_t begin, std::size_t end) {
                         auto& h = partial[w];
                         for (std::size_t i = begin; i < end; ++i) {
                           if (codes[i] >= cap)
                             throw Error(Errc::corrupt_data,
                                         "code " + std::to_string(codes[i]) + " at index " +
                                             std::to_string(i) + " is not below cap " +
                                             std::to_string(cap));
                           ++h[codes[i]];
                         }
                       });
  Histogram total(cap, 0);
  for (const auto& h : partial)
    for (std::size_t s = 0; s < cap; ++s) total[s] += h[s];
  return total;
}

/// Optimal prefix-code lengths. Ties in the merge queue are broken by the
/// smallest symbol a node contains, so the result is platform independent.
/// A lone present symbol gets length 1; absent symbols get 0.
inline std::vector<std::uint8_t> build_tree(std::span<const std::uint64_t> freq) {
  struct Node {
    std::uint64_t weight;
    std::uint32_t min_symbol;
    std::uint32_t id;
  };
  auto later = [](const Node& a, const Node& b) {
    return a.weight != b.weight ? a.weight > b.weight : a.min_symbol > b.min_symbol;
  };
  std::priority_queue<Node, std::vector<Node>, decltype(later)> queue(later);
  // parent[] over leaves [0, n) then internal nodes.
  std::vector<std::uint32_t> parent;
  std::vector<std::uint32_t> leaf_of_symbol(freq.size(), UINT32_MAX);
  for (std::uint32_t s = 0; s < freq.size(); ++s) {
    if (freq[s] == 0) continue;
    leaf_of_symbol[s] = static_cast<std::uint32_t>(parent.size());
    queue.push({freq[s], s, static_cast<std::uint32_t>(parent.size())});
    parent.push_back(UINT32_MAX);
  }
  if (queue.empty()) throw Error(Errc::invalid_argument, "cannot build a Huffman tree from an all-zero histogram");

  std::vector<std::uint8_t> widths(freq.size(), 0);
  if (queue.size() == 1) {
    widths[queue.top().min_symbol] = 1;
    return widths;
  }
  while (queue.size() > 1) {
    Node a = queue.top();
    queue.pop();
    Node b = queue.top();
    queue.pop();
    auto id = static_cast<std::uint32_t>(parent.size());
    parent.push_back(UINT32_MAX);
    parent[a.id] = id;
    parent[b.id] = id;
    if (a.weight > UINT64_MAX - b.weight)
      throw Error(Errc::invalid_argument, "histogram total overflows 64 bits");
    queue.push({a.weight + b.weight, std::min(a.min_symbol, b.min_symbol), id});
  }
  // Internal nodes are created after their children, so depths resolve root-down.
  std::vector<std::uint32_t> depth(parent.size(), 0);
  for (std::size_t i = parent.size() - 1; i-- > 0;) depth[i] = depth[parent[i]] + 1;
  for (std::size_t s = 0; s < freq.size(); ++s) {
    if (leaf_of_symbol[s] == UINT32_MAX) continue;
    std::uint32_t d = depth[leaf_of_symbol[s]];
    if (d > kMaxBitwidth)
      throw Error(Errc::invalid_argument,
                  "Huffman codeword length " + std::to_string(d) + " exceeds the supported 56 bits");
    widths[s] = static_cast<std::uint8_t>(d);
  }
  return widths;
}

/// Smallest packed unit whose low (width - 8) bits fit every codeword.
inline unsigned select_unit_width(unsigned max_bitwidth) {
  if (max_bitwidth == 0) throw Error(Errc::invalid_argument, "max bitwidth must be at least 1");
  if (max_bitwidth <= 24) return 32;
  if (max_bitwidth <= kMaxBitwidth) return 64;
  throw Error(Errc::invalid_argument,
              "codeword bitwidth " + std::to_string(max_bitwidth) + " is not supported (max 56)");
}

struct Codebook {
  unsigned unit_width = 32;
  std::vector<std::uint64_t> entries;  // one packed unit per symbol; 0 for absent symbols

  unsigned bitwidth(std::size_t symbol) const {
    return static_cast<unsigned>(entries[symbol] >> (unit_width - 8));
  }
  std::uint64_t codeword(std::size_t symbol) const {
    return entries[symbol] & ((std::uint64_t{1} << (unit_width - 8)) - 1);
  }
};

// Canonical decode tables: for each length L, codewords of length L form the
// contiguous range [first_code[L], first_code[L] + count[L]) and map to
// symbols[offset[L] + (code - first_code[L])].
struct ReverseCodebook {
  unsigned max_bitwidth = 0;
  std::vector<std::uint64_t> first_code;
  std::vector<std::uint32_t> count;
  std::vector<std::uint32_t> offset;
  std::vector<std::uint32_t> symbols;  // sorted by (bitwidth, symbol)
};

inline void check_kraft(std::span<const std::uint8_t> bitwidths) {
  unsigned max_w = 0;
  std::size_t present = 0;
  for (auto w : bitwidths) {
    if (w > kMaxBitwidth)
      throw Error(Errc::integrity, "bitwidth " + std::to_string(w) + " exceeds 56");
    max_w = std::max<unsigned>(max_w, w);
    present += (w != 0);
  }
  if (present == 0) throw Error(Errc::integrity, "codebook has no symbols");
  if (present == 1) {
    if (max_w != 1) throw Error(Errc::integrity, "a single-symbol codebook must use bitwidth 1");
    return;
  }
  // sum 2^-w == 1, scaled by 2^max_w to stay in integers.
  std::uint64_t sum = 0;
  const std::uint64_t full = std::uint64_t{1} << max_w;
  for (auto w : bitwidths) {
    if (w == 0) continue;
    sum += std::uint64_t{1} << (max_w - w);
    if (sum > full) break;
  }
  if (sum != full) throw Error(Errc::integrity, "codeword bitwidths violate the Kraft equality");
}

/// Rebuilds the canonical decode tables from bitwidths alone.
inline ReverseCodebook make_reverse_codebook(std::span<const std::uint8_t> bitwidths) {
  check_kraft(bitwidths);
  ReverseCodebook rb;
  rb.max_bitwidth = *std::max_element(bitwidths.begin(), bitwidths.end());
  rb.count.assign(rb.max_bitwidth + 1, 0);
  for (auto w : bitwidths)
    if (w) ++rb.count[w];
  rb.first_code.assign(rb.max_bitwidth + 1, 0);
  rb.offset.assign(rb.max_bitwidth + 1, 0);
  std::uint64_t code = 0;
  std::uint32_t off = 0;
  for (unsigned len = 1; len <= rb.max_bitwidth; ++len) {
    code = (code + rb.count[len - 1]) << 1;  // count[0] == 0, so first_code[1] == 0
    rb.first_code[len] = code;
    rb.offset[len] = off;
    off += rb.count[len];
  }
  rb.symbols.resize(off);
  std::vector<std::uint32_t> next = rb.offset;
  for (std::uint32_t s = 0; s < bitwidths.size(); ++s)
    if (bitwidths[s]) rb.symbols[next[bitwidths[s]]++] = s;
  return rb;
}

/// Canonical code assignment: symbols ordered by (bitwidth, symbol), first
/// code 0, +1 per symbol, shifted left whenever the bitwidth grows. Lengths
/// are taken as given.
inline std::pair<Codebook, ReverseCodebook> canonize(std::span<const std::uint8_t> bitwidths) {
  ReverseCodebook rb = make_reverse_codebook(bitwidths);
  Codebook cb;
  cb.unit_width = select_unit_width(rb.max_bitwidth);
  cb.entries.assign(bitwidths.size(), 0);
  for (unsigned len = 1; len <= rb.max_bitwidth; ++len)
    for (std::uint32_t k = 0; k < rb.count[len]; ++k) {
      std::uint32_t s = rb.symbols[rb.offset[len] + k];
      cb.entries[s] = (std::uint64_t{len} << (cb.unit_width - 8)) | (rb.first_code[len] + k);
    }
  return {std::move(cb), std::move(rb)};
}

template <class Unit>
concept PackedUnit = std::same_as<Unit, std::uint32_t> || std::same_as<Unit, std::uint64_t>;

template <PackedUnit Unit>
constexpr unsigned unit_bitwidth(Unit u) {
  return static_cast<unsigned>(u >> (sizeof(Unit) * 8 - 8));
}

template <PackedUnit Unit>
constexpr std::uint64_t unit_codeword(Unit u) {
  return static_cast<std::uint64_t>(u) & ((std::uint64_t{1} << (sizeof(Unit) * 8 - 8)) - 1);
}

/// Gathers each code's packed unit.
template <PackedUnit Unit>
std::vector<Unit> encode(std::span<const std::uint16_t> codes, const Codebook& cb,
                         unsigned threads = 1) {
  if (cb.unit_width != sizeof(Unit) * 8)
    throw Error(Errc::invalid_argument, "codebook unit width does not match the requested unit type");
  std::vector<Unit> out(codes.size());
  parallel_for(codes.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      auto c = codes[i];
      if (c >= cb.entries.size() || cb.entries[c] == 0)
        throw Error(Errc::corrupt_data,
                    "code " + std::to_string(c) + " at index " + std::to_string(i) +
                        " has no codeword");
      out[i] = static_cast<Unit>(cb.entries[c]);
    }
  });
  return out;
}

struct DeflatedStream {
  std::uint32_t chunk_size = 0;
  std::vector<std::uint32_t> chunk_bit_lengths;
  std::vector<std::uint8_t> payload;

  friend bool operator==(const DeflatedStream&, const DeflatedStream&) = default;
};

inline std::size_t chunk_count(std::size_t n_codes, std::uint32_t chunk_size) {
  return (n_codes + chunk_size - 1) / chunk_size;
}

/// About 2e4 chunks per stream: n / 2e4 rounded up to a power of two and
/// clamped to [256, 65536].
inline std::uint32_t default_chunk_size(std::size_t n_codes) {
  std::size_t want = (n_codes + 19999) / 20000;
  std::size_t p = std::bit_ceil(std::max<std::size_t>(want, 1));
  return static_cast<std::uint32_t>(std::clamp<std::size_t>(p, 256, 65536));
}

template <PackedUnit Unit>
DeflatedStream deflate(std::span<const Unit> packed, std::uint32_t chunk_size,
                       unsigned threads = 1) {
  if (chunk_size == 0) throw Error(Errc::invalid_argument, "chunk size must be at least 1");
  DeflatedStream ds;
  ds.chunk_size = chunk_size;
  const std::size_t n_chunks = chunk_count(packed.size(), chunk_size);
  ds.chunk_bit_lengths.resize(n_chunks);

  auto chunk_range = [&](std::size_t c) {
    std::size_t begin = c * chunk_size;
    return std::pair{begin, std::min(packed.size(), begin + chunk_size)};
  };
  parallel_for(n_chunks, threads, [&](std::size_t cb, std::size_t ce) {
    for (std::size_t c = cb; c < ce; ++c) {
      auto [begin, end] = chunk_range(c);
      std::uint64_t bits = 0;
      for (std::size_t i = begin; i < end; ++i) bits += unit_bitwidth(packed[i]);
      if (bits > UINT32_MAX)
        throw Error(Errc::invalid_argument, "chunk bit length overflows 32 bits; use a smaller chunk size");
      ds.chunk_bit_lengths[c] = static_cast<std::uint32_t>(bits);
    }
  });

  std::vector<std::size_t> byte_offset(n_chunks + 1, 0);
  for (std::size_t c = 0; c < n_chunks; ++c)
    byte_offset[c + 1] = byte_offset[c] + (ds.chunk_bit_lengths[c] + 7) / 8;
  ds.payload.assign(byte_offset[n_chunks], 0);

  parallel_for(n_chunks, threads, [&](std::size_t cb, std::size_t ce) {
    for (std::size_t c = cb; c < ce; ++c) {
      auto [begin, end] = chunk_range(c);
      BitWriter w(std::span(ds.payload).subspan(byte_offset[c], byte_offset[c + 1] - byte_offset[c]));
      for (std::size_t i = begin; i < end; ++i) w.write(unit_codeword(packed[i]), unit_bitwidth(packed[i]));
    }
  });
  return ds;
}

/// Decodes n_codes symbols. Each chunk is decoded sequentially and must
/// consume exactly its recorded bit length.
inline std::vector<std::uint16_t> inflate(const DeflatedStream& ds, const ReverseCodebook& rb,
                                          std::size_t n_codes, unsigned threads = 1) {
  if (ds.chunk_size == 0) throw Error(Errc::corrupt_data, "chunk size is zero");
  const std::size_t n_chunks = chunk_count(n_codes, ds.chunk_size);
  if (ds.chunk_bit_lengths.size() != n_chunks)
    throw Error(Errc::corrupt_data, "stream has " + std::to_string(ds.chunk_bit_lengths.size()) +
                                        " chunks but " + std::to_string(n_codes) +
                                        " codes need " + std::to_string(n_chunks));
  std::vector<std::size_t> byte_offset(n_chunks + 1, 0);
  for (std::size_t c = 0; c < n_chunks; ++c)
    byte_offset[c + 1] = byte_offset[c] + (std::size_t{ds.chunk_bit_lengths[c]} + 7) / 8;
  if (byte_offset[n_chunks] != ds.payload.size())
    throw Error(Errc::corrupt_data, "payload is " + std::to_string(ds.payload.size()) +
                                        " bytes but chunk lengths imply " +
                                        std::to_string(byte_offset[n_chunks]));

  std::vector<std::uint16_t> out(n_codes);
  parallel_for(n_chunks, threads, [&](std::size_t cb, std::size_t ce) {
    for (std::size_t c = cb; c < ce; ++c) {
      std::size_t begin = c * ds.chunk_size;
      std::size_t end = std::min(n_codes, begin + ds.chunk_size);
      BitReader r(std::span(ds.payload).subspan(byte_offset[c], byte_offset[c + 1] - byte_offset[c]),
                  ds.chunk_bit_lengths[c]);
      for (std::size_t i = begin; i < end; ++i) {
        std::uint64_t code = 0;
        unsigned len = 0;
        for (;;) {
          if (r.exhausted())
            throw Error(Errc::corrupt_data, "bitstream exhausted mid-codeword in chunk " + std::to_string(c));
          code = (code << 1) | r.read_bit();
          ++len;
          if (len > rb.max_bitwidth)
            throw Error(Errc::corrupt_data, "invalid codeword in chunk " + std::to_string(c));
          if (code >= rb.first_code[len] && code - rb.first_code[len] < rb.count[len]) break;
        }
        out[i] = static_cast<std::uint16_t>(rb.symbols[rb.offset[len] + (code - rb.first_code[len])]);
      }
      if (!r.exhausted())
        throw Error(Errc::corrupt_data, "chunk " + std::to_string(c) + " has " +
                                            std::to_string(r.bits_left()) + " trailing bits");
    }
  });
  return out;
}

/// Shannon entropy of the histogram, bits per symbol.
inline double entropy_bits(std::span<const std::uint64_t> freq) {
  double total = 0;
  for (auto f : freq) total += static_cast<double>(f);
  double h = 0;
  for (auto f : freq)
    if (f) {
      double p = static_cast<double>(f) / total;
      h -= p * std::log2(p);
    }
  return h;
}

}  // namespace sdqz
