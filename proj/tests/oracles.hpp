#pragma once

// Independent reference implementations used only by the tests. None of
// these reuse the library's code paths they are checked against.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "sdqz/core.hpp"
#include "sdqz/dualquant.hpp"

namespace sdqz::oracle {

struct NaiveQuant {
  std::vector<std::uint16_t> codes;
  std::vector<Outlier> outliers;
};

// Single loop over the field in storage order. Each point finds its block by
// integer division and reads neighbours straight from the prequantized
// array, treating anything outside its own block as 0.
template <class T>
NaiveQuant dual_quant(const std::vector<T>& data, const Dims& dims, double eb, std::uint32_t cap,
                      const std::vector<std::uint32_t>& block) {
  const std::size_t rank = dims.size();
  std::vector<long long> ext(3, 1), bs(3, 1);
  for (std::size_t i = 0; i < rank; ++i) {
    ext[3 - rank + i] = static_cast<long long>(dims[i]);
    bs[3 - rank + i] = block[i];
  }
  std::vector<double> pre(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) pre[i] = std::round(static_cast<double>(data[i]) / (2 * eb));

  auto value = [&](long long z, long long y, long long x, long long z0, long long y0, long long x0) {
    if (z < z0 || y < y0 || x < x0) return 0.0;
    return pre[static_cast<std::size_t>((z * ext[1] + y) * ext[2] + x)];
  };

  NaiveQuant out;
  out.codes.resize(data.size());
  const double radius = cap / 2.0;
  for (long long z = 0; z < ext[0]; ++z)
    for (long long y = 0; y < ext[1]; ++y)
      for (long long x = 0; x < ext[2]; ++x) {
        long long z0 = z / bs[0] * bs[0], y0 = y / bs[1] * bs[1], x0 = x / bs[2] * bs[2];
        auto v = [&](long long dz, long long dy, long long dx) {
          return value(z - dz, y - dy, x - dx, z0, y0, x0);
        };
        double p;
        if (rank == 1)
          p = v(0, 0, 1);
        else if (rank == 2)
          p = v(0, 1, 0) + v(0, 0, 1) - v(0, 1, 1);
        else
          p = v(1, 0, 0) + v(0, 1, 0) + v(0, 0, 1) - v(1, 1, 0) - v(1, 0, 1) - v(0, 1, 1) + v(1, 1, 1);
        std::size_t gi = static_cast<std::size_t>((z * ext[1] + y) * ext[2] + x);
        double delta = pre[gi] - p;
        if (std::fabs(delta) < radius) {
          out.codes[gi] = static_cast<std::uint16_t>(delta + radius);
        } else {
          out.codes[gi] = 0;
          out.outliers.push_back({gi, pre[gi]});
        }
      }
  return out;
}

// Minimum sum(freq * len) over all prefix codes. Lengths are enumerated as
// nondecreasing sequences satisfying Kraft's inequality and paired with the
// frequencies sorted in descending order (by the rearrangement inequality
// no other pairing of a given length multiset is cheaper).
inline std::uint64_t optimal_prefix_cost(std::vector<std::uint64_t> freq) {
  freq.erase(std::remove(freq.begin(), freq.end(), 0u), freq.end());
  const std::size_t n = freq.size();
  if (n == 0) return 0;
  if (n == 1) return freq[0];  // one symbol still needs one bit
  std::sort(freq.rbegin(), freq.rend());
  const unsigned max_len = static_cast<unsigned>(n - 1);
  const std::uint64_t full = std::uint64_t{1} << max_len;
  std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
  std::vector<unsigned> len(n);
  auto dfs = [&](auto&& self, std::size_t i, unsigned min_len, std::uint64_t kraft, std::uint64_t cost) -> void {
    if (cost >= best) return;
    if (i == n) {
      best = cost;
      return;
    }
    for (unsigned l = min_len; l <= max_len; ++l) {
      std::uint64_t k = kraft + (full >> l);
      if (k > full) continue;
      self(self, i + 1, l, k, cost + freq[i] * l);
    }
  };
  dfs(dfs, 0, 1, 0, 0);
  return best;
}

// Concatenates codewords as a '0'/'1' string.
inline std::string bit_string(const std::vector<std::pair<std::uint64_t, unsigned>>& words) {
  std::string s;
  for (auto [w, n] : words)
    for (unsigned i = n; i-- > 0;) s.push_back(((w >> i) & 1) ? '1' : '0');
  return s;
}

inline std::string bytes_to_bits(const std::vector<std::uint8_t>& bytes, std::size_t nbits) {
  std::string s;
  for (std::size_t i = 0; i < nbits; ++i) s.push_back(((bytes[i / 8] >> (7 - i % 8)) & 1) ? '1' : '0');
  return s;
}

// Exact entropy in bits per symbol, long double accumulation.
inline long double entropy(const std::vector<std::uint64_t>& freq) {
  long double total = 0;
  for (auto f : freq) total += f;
  long double h = 0;
  for (auto f : freq)
    if (f) h -= (f / total) * std::log2(static_cast<long double>(f) / total);
  return h;
}

}  // namespace sdqz::oracle
