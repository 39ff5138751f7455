#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sdqz/huffman.hpp"

namespace sdqz {
namespace {

// Symbols a, b, c, d of the worked example.
constexpr std::uint16_t A = 0, B = 1, C = 2, D = 3;

std::pair<Codebook, ReverseCodebook> example_codebook() {
  std::vector<std::uint8_t> widths{1, 2, 3, 3};
  return canonize(widths);
}

TEST(Histogram, Counts) {
  std::vector<std::uint16_t> codes{511, 512, 512, 513};
  auto h = histogram(codes, 1024);
  ASSERT_EQ(h.size(), 1024u);
  EXPECT_EQ(h[511], 1u);
  EXPECT_EQ(h[512], 2u);
  EXPECT_EQ(h[513], 1u);
  EXPECT_EQ(std::accumulate(h.begin(), h.end(), std::uint64_t{0}), 4u);
}

TEST(Histogram, EmptyAndUniform) {
  auto h = histogram({}, 64);
  EXPECT_TRUE(std::all_of(h.begin(), h.end(), [](auto f) { return f == 0; }));
  std::vector<std::uint16_t> same(1000000, 77);
  auto h2 = histogram(same, 128, 4);
  EXPECT_EQ(h2[77], 1000000u);
}

TEST(Histogram, WorkerCountIndependent) {
  std::mt19937 rng(1);
  std::vector<std::uint16_t> codes(100003);
  for (auto& c : codes) c = rng() % 300;
  std::vector<std::uint64_t> seq(300, 0);
  for (auto c : codes) ++seq[c];
  for (unsigned t : {1u, 2u, 7u, 32u}) EXPECT_EQ(histogram(codes, 300, t), seq);
}

TEST(Histogram, CodeAboveCap) {
  std::vector<std::uint16_t> codes{1, 2, 64};
  EXPECT_THROW(histogram(codes, 64), Error);
}

TEST(BuildTree, WorkedExample) {
  std::vector<std::uint64_t> freq{5, 2, 1, 1};
  auto w = build_tree(freq);
  EXPECT_EQ(w, (std::vector<std::uint8_t>{1, 2, 3, 3}));
  std::uint64_t cost = 0;
  for (std::size_t s = 0; s < freq.size(); ++s) cost += freq[s] * w[s];
  EXPECT_EQ(cost, 15u);
  EXPECT_EQ(oracle::optimal_prefix_cost(freq), 15u);
}

TEST(BuildTree, DegenerateCases) {
  std::vector<std::uint64_t> one(16, 0);
  one[9] = 42;
  auto w = build_tree(one);
  EXPECT_EQ(w[9], 1);
  EXPECT_EQ(std::count(w.begin(), w.end(), 0), 15);
  auto [cb, rb] = canonize(w);
  EXPECT_EQ(cb.codeword(9), 0u);
  EXPECT_EQ(cb.bitwidth(9), 1u);

  std::vector<std::uint64_t> two{0, 1000, 0, 1};
  EXPECT_EQ(build_tree(two), (std::vector<std::uint8_t>{0, 1, 0, 1}));

  std::vector<std::uint64_t> none(8, 0);
  EXPECT_THROW(build_tree(none), Error);
}

TEST(BuildTree, TieBreakIsDeterministic) {
  // All-equal weights: lengths depend only on the tie rule.
  std::vector<std::uint64_t> freq(5, 1);
  EXPECT_EQ(build_tree(freq), (std::vector<std::uint8_t>{3, 3, 2, 2, 2}));
}

TEST(BuildTree, MatchesExhaustiveOptimum) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    std::size_t n = 2 + rng() % 7;
    std::vector<std::uint64_t> freq(n);
    for (auto& f : freq) f = rng() % 50;
    if (std::count(freq.begin(), freq.end(), 0u) == static_cast<long>(n)) freq[0] = 1;
    auto w = build_tree(freq);
    std::uint64_t cost = 0;
    for (std::size_t s = 0; s < n; ++s) cost += freq[s] * w[s];
    ASSERT_EQ(cost, oracle::optimal_prefix_cost(freq)) << "trial " << trial;
  }
}

TEST(Canonize, WorkedExample) {
  auto [cb, rb] = example_codebook();
  EXPECT_EQ(cb.unit_width, 32u);
  EXPECT_EQ(cb.codeword(A), 0b0u);
  EXPECT_EQ(cb.codeword(B), 0b10u);
  EXPECT_EQ(cb.codeword(C), 0b110u);
  EXPECT_EQ(cb.codeword(D), 0b111u);
  EXPECT_EQ(cb.entries[C], 0x03000006u);
  EXPECT_EQ(rb.symbols, (std::vector<std::uint32_t>{A, B, C, D}));
}

TEST(Canonize, KraftViolationRejected) {
  std::vector<std::uint8_t> over{1, 1, 2};
  EXPECT_THROW(canonize(over), Error);
  std::vector<std::uint8_t> under{1, 2};
  EXPECT_THROW(canonize(under), Error);
  std::vector<std::uint8_t> lone{0, 2, 0};
  EXPECT_THROW(canonize(lone), Error);
}

TEST(Canonize, PreservesLengthsAndIsPrefixFree) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t cap = 4u << (rng() % 8);
    std::vector<std::uint64_t> freq(cap, 0);
    for (auto& f : freq)
      if (rng() % 3) f = 1 + rng() % (1u << (rng() % 16));
    freq[rng() % cap] += 1;
    auto w = build_tree(freq);
    auto [cb, rb] = canonize(w);
    std::vector<std::string> words;
    for (std::size_t s = 0; s < cap; ++s) {
      ASSERT_EQ(cb.bitwidth(s), w[s]);
      if (w[s]) words.push_back(oracle::bit_string({{cb.codeword(s), w[s]}}));
    }
    std::sort(words.begin(), words.end());
    for (std::size_t i = 1; i < words.size(); ++i)
      ASSERT_NE(words[i].rfind(words[i - 1], 0), 0u) << words[i - 1] << " prefixes " << words[i];
  }
}

TEST(SelectUnitWidth, Rule) {
  EXPECT_EQ(select_unit_width(12), 32u);
  EXPECT_EQ(select_unit_width(24), 32u);
  EXPECT_EQ(select_unit_width(25), 64u);
  EXPECT_EQ(select_unit_width(33), 64u);
  EXPECT_EQ(select_unit_width(56), 64u);
  EXPECT_THROW(select_unit_width(57), Error);
  EXPECT_THROW(select_unit_width(0), Error);
}

TEST(Encode, Gather) {
  auto [cb, rb] = example_codebook();
  std::vector<std::uint16_t> one{C};
  EXPECT_EQ(encode<std::uint32_t>(one, cb), (std::vector<std::uint32_t>{0x03000006u}));
  EXPECT_TRUE(encode<std::uint32_t>({}, cb).empty());
  std::vector<std::uint16_t> aaa{A, A, A};
  auto packed = encode<std::uint32_t>(aaa, cb);
  EXPECT_EQ(packed, (std::vector<std::uint32_t>(3, static_cast<std::uint32_t>(cb.entries[A]))));
  EXPECT_THROW(encode<std::uint64_t>(one, cb), Error);
}

TEST(Encode, AbsentSymbolIsAnError) {
  std::vector<std::uint8_t> w{1, 0, 1};
  auto [cb, rb] = canonize(w);
  std::vector<std::uint16_t> codes{0, 1};
  EXPECT_THROW(encode<std::uint32_t>(codes, cb), Error);
}

TEST(Deflate, BitOrderExample) {
  std::vector<std::uint32_t> packed{(3u << 24) | 0b110u, (2u << 24) | 0b01u};
  auto ds = deflate<std::uint32_t>(packed, 16);
  EXPECT_EQ(ds.chunk_bit_lengths, (std::vector<std::uint32_t>{5}));
  EXPECT_EQ(ds.payload, (std::vector<std::uint8_t>{0b11001000}));
}

TEST(Deflate, OneCodePerChunk) {
  auto [cb, rb] = example_codebook();
  std::vector<std::uint16_t> codes{A, B, C, D, A};
  auto ds = deflate<std::uint32_t>(encode<std::uint32_t>(codes, cb), 1);
  EXPECT_EQ(ds.chunk_bit_lengths, (std::vector<std::uint32_t>{1, 2, 3, 3, 1}));
  EXPECT_EQ(ds.payload.size(), 5u);
}

TEST(Inflate, WorkedExamples) {
  auto [cb, rb] = example_codebook();
  // 110 | 0 -> c, a
  DeflatedStream s1{16, {4}, {0b11000000}};
  EXPECT_EQ(inflate(s1, rb, 2), (std::vector<std::uint16_t>{C, A}));
  // 110 | 10 -> c, b
  DeflatedStream s2{16, {5}, {0b11010000}};
  EXPECT_EQ(inflate(s2, rb, 2), (std::vector<std::uint16_t>{C, B}));
}

TEST(Inflate, CorruptStreams) {
  auto [cb, rb] = example_codebook();
  DeflatedStream truncated{16, {2}, {0b11000000}};  // "11" stops mid-codeword
  EXPECT_THROW(inflate(truncated, rb, 1), Error);
  DeflatedStream extra{16, {4}, {0b11000000}};  // one code expected, 4 bits present
  EXPECT_THROW(inflate(extra, rb, 1), Error);
  DeflatedStream wrong_chunks{1, {3}, {0b11000000}};
  EXPECT_THROW(inflate(wrong_chunks, rb, 2), Error);
  DeflatedStream short_payload{16, {12}, {0xFF}};
  EXPECT_THROW(inflate(short_payload, rb, 4), Error);

  // Single-symbol codebooks only know codeword "0".
  std::vector<std::uint8_t> w{0, 1};
  auto [cb1, rb1] = canonize(w);
  DeflatedStream ones{16, {1}, {0b10000000}};
  EXPECT_THROW(inflate(ones, rb1, 1), Error);
}

TEST(RoundTrip, RandomSequencesAnyChunking) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    std::uint32_t cap = 4u << (rng() % 9);
    std::size_t n = 1 + rng() % 20000;
    std::vector<std::uint16_t> codes(n);
    // Skewed around the centre, like quantization codes.
    std::uint32_t spread = 1 + rng() % cap;
    for (auto& c : codes) {
      auto d = static_cast<std::int64_t>(rng() % spread) - static_cast<std::int64_t>(rng() % spread);
      c = static_cast<std::uint16_t>(std::clamp<std::int64_t>(cap / 2 + d / 2, 0, cap - 1));
    }
    auto freq = histogram(codes, cap);
    auto [cb, rb] = canonize(build_tree(freq));
    ASSERT_EQ(cb.unit_width, 32u);
    auto packed = encode<std::uint32_t>(codes, cb);
    std::string reference;
    for (auto u : packed) reference += oracle::bit_string({{unit_codeword(u), unit_bitwidth(u)}});
    for (std::uint32_t chunk : {1u, 64u, 4096u, static_cast<std::uint32_t>(1 + rng() % 5000)}) {
      auto ds = deflate<std::uint32_t>(packed, chunk, 1 + trial % 4);
      std::string bits;
      std::size_t off = 0, total_bytes = 0;
      for (auto len : ds.chunk_bit_lengths) {
        std::vector<std::uint8_t> part(ds.payload.begin() + off, ds.payload.begin() + off + (len + 7) / 8);
        bits += oracle::bytes_to_bits(part, len);
        off += (len + 7) / 8;
        total_bytes += (len + 7) / 8;
      }
      ASSERT_EQ(total_bytes, ds.payload.size());
      ASSERT_EQ(bits, reference);
      ASSERT_EQ(inflate(ds, rb, n, 1 + trial % 3), codes);
    }
  }
}

TEST(EntropyBound, AverageLengthWithinOneBit) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t cap = 2 + rng() % 1023;
    std::vector<std::uint64_t> freq(cap);
    for (auto& f : freq) f = rng() % 4 ? rng() % 1000 : 0;
    freq[0] += 1;
    freq[cap - 1] += 1;
    auto w = build_tree(freq);
    long double total = 0, bits = 0;
    for (std::size_t s = 0; s < cap; ++s) {
      total += freq[s];
      bits += static_cast<long double>(freq[s]) * w[s];
    }
    long double h = oracle::entropy(freq);
    ASSERT_LE(h, bits / total + 1e-12L);
    ASSERT_LT(bits / total, h + 1);
  }
}

TEST(DefaultChunkSize, TargetsAbout20000Chunks) {
  EXPECT_EQ(default_chunk_size(0), 256u);
  EXPECT_EQ(default_chunk_size(1000), 256u);
  EXPECT_EQ(default_chunk_size(512u * 512u * 512u), 8192u);  // ceil(6710.9) -> 8192
  EXPECT_EQ(default_chunk_size(std::size_t{1} << 40), 65536u);
}

}  // namespace
}  // namespace sdqz
